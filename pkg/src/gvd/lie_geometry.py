"""Standard Lie coordinates for points, oriented spheres and oriented planes.

A Lie vector lives in R^{d+3} with the bilinear form

    <x, y> = -x1 y1 + x2 y2 + ... + x_{d+2} y_{d+2} - x_{d+3} y_{d+3}

Points and spheres are stored with x1 + x2 = 1, planes with x1 + x2 = 0 and
x_{d+3} = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InvalidInputError

EPS_PRED = 1e-9
UNIT_TOL = 1e-12

Kind = Literal["point", "sphere", "plane"]


def _finite_vector(values, name="coords") -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EuclideanPoint:
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _finite_vector(self.coords))

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class OrientedSphere:
    center: np.ndarray
    signed_radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _finite_vector(self.center, "center"))
        r = float(self.signed_radius)
        if not np.isfinite(r):
            raise InvalidInputError("radius must be finite")
        object.__setattr__(self, "signed_radius", r)

    @property
    def dim(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class OrientedPlane:
    normal: np.ndarray
    height: float

    def __post_init__(self):
        n = _finite_vector(self.normal, "normal")
        if abs(float(np.linalg.norm(n)) - 1.0) > UNIT_TOL:
            raise InvalidInputError("plane normal must have unit length")
        h = float(self.height)
        if not np.isfinite(h):
            raise InvalidInputError("height must be finite")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "height", h)

    @property
    def dim(self) -> int:
        return self.normal.size


@dataclass(frozen=True)
class LieVector:
    coords: np.ndarray
    kind: Kind

    def __post_init__(self):
        x = _finite_vector(self.coords)
        if x.size < 5:
            raise InvalidInputError("Lie vectors need at least 5 coordinates")
        if self.kind not in ("point", "sphere", "plane"):
            raise InvalidInputError(f"unknown kind {self.kind!r}")
        if quadric_residual(x) > 1e-10:
            raise InvalidInputError("coordinates are not on the Lie quadric")
        if self.kind == "plane":
            if abs(x[0] + x[1]) > UNIT_TOL or abs(x[-1] - 1.0) > UNIT_TOL:
                raise InvalidInputError("plane coordinates need x1 + x2 = 0, x_last = 1")
        else:
            if abs(x[0] + x[1] - 1.0) > UNIT_TOL * max(1.0, abs(x[0]), abs(x[1])):
                raise InvalidInputError("sphere coordinates need x1 + x2 = 1")
            if self.kind == "point" and x[-1] != 0.0:
                raise InvalidInputError("point coordinates need x_last = 0")
        object.__setattr__(self, "coords", x)

    @property
    def dim(self) -> int:
        """Dimension d of the Euclidean space this vector describes."""
        return self.coords.size - 3

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __len__(self):
        return self.coords.size


# Used by tests only; no diagram computation needs the improper point.
IMPROPER_POINT = np.array([1.0, -1.0, 0.0, 0.0, 0.0])
IMPROPER_POINT.setflags(write=False)


def _as_point(p) -> np.ndarray:
    if isinstance(p, EuclideanPoint):
        return p.coords
    return _finite_vector(p)


def point_to_lie(p) -> LieVector:
    x = _as_point(p)
    pp = float(x @ x)
    coords = np.concatenate(([(1.0 + pp) / 2.0, (1.0 - pp) / 2.0], x, [0.0]))
    return LieVector(coords, "point")


def sphere_to_lie(s, radius=None) -> LieVector:
    """Lie coordinates of an oriented sphere.

    Accepts an OrientedSphere or a (center, signed_radius) pair. A zero
    radius yields the point sphere, identical to point_to_lie(center).
    """
    if isinstance(s, OrientedSphere):
        q, r = s.center, s.signed_radius
    else:
        if radius is None:
            raise InvalidInputError("sphere_to_lie needs a radius")
        q = _finite_vector(s, "center")
        r = float(radius)
        if not np.isfinite(r):
            raise InvalidInputError("radius must be finite")
    qq = float(q @ q)
    rr = r * r
    coords = np.concatenate(([(1.0 + qq - rr) / 2.0, (1.0 - qq + rr) / 2.0], q, [r]))
    return LieVector(coords, "point" if r == 0.0 else "sphere")


def plane_to_lie(h, height=None) -> LieVector:
    if not isinstance(h, OrientedPlane):
        h = OrientedPlane(h, height)
    coords = np.concatenate(([h.height, -h.height], h.normal, [1.0]))
    return LieVector(coords, "plane")


def signature(n: int) -> np.ndarray:
    """Diagonal of the Lie form on R^n."""
    w = np.ones(n)
    w[0] = -1.0
    w[-1] = -1.0
    return w


def _raw(x) -> np.ndarray:
    if isinstance(x, LieVector):
        return x.coords
    return np.asarray(x, dtype=float)


def lie_product(x, y) -> float:
    a, b = _raw(x), _raw(y)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidInputError(
            f"lie_product needs equal-length vectors, got {a.shape} and {b.shape}")
    return float(-a[0] * b[0] + a[1:-1] @ b[1:-1] - a[-1] * b[-1])


def fold(a) -> np.ndarray:
    """Coefficients c with c . sigma == <a, sigma> for every sigma."""
    c = np.array(_raw(a), dtype=float)
    c[0] = -c[0]
    c[-1] = -c[-1]
    return c


def mobius_project(x) -> np.ndarray:
    out = np.array(_raw(x), dtype=float)
    out[-1] = 0.0
    return out


def _check_spherical(x: LieVector):
    if x.kind == "plane":
        raise InvalidInputError("planes have no center or radius")


def center_of(x: LieVector) -> EuclideanPoint:
    _check_spherical(x)
    return EuclideanPoint(x.coords[2:-1])


def radius_of(x: LieVector) -> float:
    _check_spherical(x)
    return float(x.coords[-1])


def flip_orientation(x: LieVector) -> LieVector:
    """The same sphere with opposite orientation."""
    _check_spherical(x)
    c = np.array(x.coords)
    c[-1] = -c[-1]
    return LieVector(c, x.kind)


def quadric_residual(x) -> float:
    a = _raw(x)
    return abs(lie_product(a, a)) / max(1.0, float(a @ a))


def _normalized_product(x, y) -> float:
    a, b = _raw(x), _raw(y)
    return lie_product(a / np.linalg.norm(a), b / np.linalg.norm(b))


# relation name -> (allowed kinds of x, allowed kinds of y)
_SPHERICAL = ("point", "sphere")
_RELATIONS = {
    "incident": (("point",), ("sphere", "plane")),
    "inside": (("point",), ("sphere",)),
    "outside": (("point",), ("sphere",)),
    "in_halfspace": (("point",), ("plane",)),
    "sphere_in_halfspace": (_SPHERICAL, ("plane",)),
    "exterior": (_SPHERICAL, _SPHERICAL),
    "mobius_nonpositive": (_SPHERICAL, _SPHERICAL),
    "contact": (_SPHERICAL, ("point", "sphere", "plane")),
    "externally_tangent": (_SPHERICAL, _SPHERICAL),
}
RELATIONS = tuple(_RELATIONS)


def predicate(x: LieVector, y: LieVector, relation: str, eps: float = EPS_PRED) -> bool:
    """Evaluate a geometric relation between two Lie vectors.

    Products are taken after scaling both vectors to unit Euclidean norm, so
    `eps` is an absolute tolerance on that normalized value. For "exterior"
    and "externally_tangent" pass both spheres with their usual positive
    orientation; the second one is flipped internally.
    """
    if relation not in _RELATIONS:
        raise InvalidInputError(f"unknown relation {relation!r}")
    kx, ky = _RELATIONS[relation]
    if x.kind not in kx or y.kind not in ky:
        raise InvalidInputError(
            f"relation {relation!r} is not defined for ({x.kind}, {y.kind})")
    if x.coords.shape != y.coords.shape:
        raise InvalidInputError("dimension mismatch")

    if relation in ("exterior", "externally_tangent"):
        y = flip_orientation(y)
    if relation == "mobius_nonpositive":
        return _normalized_product(x, mobius_project(y)) <= eps

    v = _normalized_product(x, y)
    if relation in ("incident", "contact", "externally_tangent"):
        return abs(v) <= eps
    if relation in ("inside", "in_halfspace", "sphere_in_halfspace"):
        return v > eps
    return v < -eps  # outside, exterior


def mobius_scalar_product(q1, r1, q2, r2) -> float:
    """rho(S1, S2) = (r1^2 + r2^2 - |q1 - q2|^2) / 2."""
    diff = np.asarray(q1, dtype=float) - np.asarray(q2, dtype=float)
    return 0.5 * (r1 * r1 + r2 * r2 - float(diff @ diff))
