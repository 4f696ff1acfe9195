"""Hull backend selection: the compiled kernel when it imports, else Python."""
from ._pyhull import incremental_hull as _python_hull

try:
    from ._chull import incremental_hull as _compiled_hull
except ImportError:  # extension not built
    _compiled_hull = None

AVAILABLE = ("cython", "python") if _compiled_hull is not None else ("python",)
DEFAULT = AVAILABLE[0]


def get(name=None):
    name = name or DEFAULT
    if name == "python":
        return _python_hull
    if name == "cython":
        if _compiled_hull is None:
            raise ImportError("compiled hull kernel is not built")
        return _compiled_hull
    raise ValueError(f"unknown hull backend {name!r}")
