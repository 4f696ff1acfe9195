"""Generalized Voronoi diagrams from linear inequalities on the Lie quadric."""
from .affine_md import (LinearFunctional, MinimizationDiagram, QuadraticFunction,
                        minimization_diagram, order_k_family, phi, quadratic_to_functional)
from .dataset import (DataSet, ExteriorSphere, HalfSpace, LinearInequality, PointInside,
                      PointOutside, PowerSphere, assemble_system, inequality_for_site,
                      make_sites)
from .errors import (DegenerateInputError, GVDError, InfeasibleSystemError,
                     InvalidInputError, ParseError, UnsupportedError)
from .hull import (BoundingBox, Polytope, choose_bounding_box, diagram_edges,
                   feasible_point, halfspace_intersection, normalize_slice)
from .lie_geometry import (EuclideanPoint, LieVector, OrientedPlane, OrientedSphere,
                           center_of, lie_product, mobius_project, plane_to_lie,
                           point_to_lie, predicate, radius_of, sphere_to_lie)
from .quadric import (DiagramEdge, DiagramVertex, GeneralizedDiagram, build_diagram,
                      compute_diagram, edge_quadric_roots, locate, locate_grid)

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "DataSet", "DegenerateInputError", "DiagramEdge", "DiagramVertex",
    "EuclideanPoint", "ExteriorSphere", "GVDError", "GeneralizedDiagram", "HalfSpace",
    "InfeasibleSystemError", "InvalidInputError", "LieVector", "LinearFunctional",
    "LinearInequality", "MinimizationDiagram", "OrientedPlane", "OrientedSphere",
    "ParseError", "PointInside", "PointOutside", "Polytope", "PowerSphere",
    "QuadraticFunction", "UnsupportedError", "assemble_system", "build_diagram",
    "center_of", "choose_bounding_box", "compute_diagram", "diagram_edges",
    "edge_quadric_roots", "feasible_point", "halfspace_intersection",
    "inequality_for_site", "lie_product", "locate", "locate_grid", "make_sites", "minimization_diagram",
    "mobius_project", "normalize_slice", "order_k_family", "phi", "plane_to_lie",
    "point_to_lie", "predicate", "quadratic_to_functional", "radius_of", "sphere_to_lie",
]
