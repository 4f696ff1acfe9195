from .backends import AVAILABLE as BACKENDS, DEFAULT as DEFAULT_BACKEND
from .polytope import Polytope, diagram_edges, halfspace_intersection
from .system import (EPS_FEAS, BoundingBox, ReducedSystem, choose_bounding_box,
                     feasible_point, normalize_slice, sigma1_caps)

__all__ = [
    "BACKENDS", "DEFAULT_BACKEND", "EPS_FEAS", "BoundingBox", "Polytope",
    "ReducedSystem", "choose_bounding_box", "diagram_edges", "feasible_point",
    "halfspace_intersection", "normalize_slice", "sigma1_caps",
]
