"""Minimization diagrams of quadratic families through the point-sphere paraboloid.

f(x) = a|x - q|^2 + b.x + c equals <phi(x), avec> for a Lie functional avec
with zero last slot, so the region where f_i is minimal is the preimage under
phi of a convex polyhedron in (sigma_1, x). Each cell is built as its own
polytope and cut with the paraboloid sigma_1 = (1 + |x|^2)/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .dataset import BOX_TAG, SITE, Tag
from .errors import InfeasibleSystemError, InvalidInputError, DegenerateInputError
from .hull import (EPS_FEAS, BoundingBox, ReducedSystem, feasible_point,
                   halfspace_intersection, sigma1_caps)
from .hull.polytope import _components
from .lie_geometry import fold, point_to_lie
from .quadric import BOUNDARY, CLOSED, MERGE_TOL, QuadricSection

PARABOLOID_TOL = 1e-8


@dataclass(frozen=True)
class QuadraticFunction:
    """f(x) = a |x - q|^2 + b.x + c."""
    a: float
    q: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        q = np.array(self.q, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        a, c = float(self.a), float(self.c)
        if q.shape != b.shape:
            raise InvalidInputError("q and b must have the same length")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(b))
                and np.isfinite(a) and np.isfinite(c)):
            raise InvalidInputError("quadratic parameters must be finite")
        q.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.q.size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        dx = x - self.q
        return self.a * np.sum(dx * dx, axis=-1) + x @ self.b + self.c

    @classmethod
    def squared_distance(cls, p):
        p = np.asarray(p, dtype=float)
        return cls(1.0, p, np.zeros_like(p), 0.0)

    @classmethod
    def power(cls, center, radius):
        center = np.asarray(center, dtype=float)
        return cls(1.0, center, np.zeros_like(center), -float(radius) ** 2)

    @classmethod
    def weighted(cls, p, w):
        """Squared multiplicatively weighted distance (|x - p| / w)^2."""
        p = np.asarray(p, dtype=float)
        return cls(1.0 / float(w) ** 2, p, np.zeros_like(p), 0.0)


@dataclass(frozen=True)
class LinearFunctional:
    """L(y) = <y, avec> under the Lie product."""
    avec: np.ndarray

    def __post_init__(self):
        v = np.array(self.avec, dtype=float).ravel()
        if v.size < 5 or v[-1] != 0.0:
            raise InvalidInputError("functional needs d+3 entries with a zero last slot")
        v.setflags(write=False)
        object.__setattr__(self, "avec", v)

    def __call__(self, y) -> float:
        return float(fold(self.avec) @ np.asarray(y, dtype=float))


def quadratic_to_functional(f: QuadraticFunction) -> LinearFunctional:
    k = f.a * float(f.q @ f.q) + f.c
    return LinearFunctional(np.concatenate([[-f.a - k, -f.a + k], f.b - 2.0 * f.a * f.q, [0.0]]))


def phi(x) -> np.ndarray:
    return point_to_lie(np.asarray(getattr(x, "coords", x), dtype=float)).coords


def phi_inverse(y) -> np.ndarray:
    """Center of a point sphere; rejects vectors off the paraboloid."""
    y = np.asarray(y, dtype=float)
    x = y[2:-1]
    if abs(y[0] + y[1] - 1.0) > PARABOLOID_TOL or abs(y[-1]) > PARABOLOID_TOL:
        raise InvalidInputError("not a point sphere")
    if abs(y[0] - y[1] - x @ x) > PARABOLOID_TOL * max(1.0, x @ x):
        raise InvalidInputError("vector is off the paraboloid")
    return x.copy()


def order_k_family(fs, k: int) -> list:
    """Sums over all k-subsets, in itertools.combinations order."""
    fs = list(fs)
    m = len(fs)
    if not 1 <= int(k) <= m:
        raise InvalidInputError(f"order k must lie in [1, {m}], got {k}")
    out = []
    for idx in combinations(range(m), int(k)):
        A = sum(fs[i].a for i in idx)
        aq = sum(fs[i].a * fs[i].q for i in idx)
        b = sum(fs[i].b for i in idx)
        c = sum(fs[i].a * float(fs[i].q @ fs[i].q) + fs[i].c for i in idx)
        if A != 0.0:
            q = aq / A
            out.append(QuadraticFunction(A, q, b, c - A * float(q @ q)))
        else:
            out.append(QuadraticFunction(0.0, np.zeros_like(b), b - 2.0 * aq, c))
    return out


def order_k_labels(m: int, k: int) -> list:
    return [tuple(i + 1 for i in idx) for idx in combinations(range(m), k)]


@dataclass(frozen=True)
class MDVertex:
    point: np.ndarray
    indices: frozenset


@dataclass(frozen=True)
class MDEdge:
    endpoints: tuple
    indices: frozenset
    polyline: np.ndarray


@dataclass(frozen=True)
class MinimizationDiagram:
    """Cells are labeled by 1-based indices into the family; with order_k > 1
    a label is the sorted tuple of original indices it sums."""
    vertices: tuple
    edges: tuple
    cells: tuple
    order_k: int
    labels: tuple
    functions: tuple
    box: float
    cell_systems: dict = field(default_factory=dict, repr=False, compare=False)

    def label(self, x, eps: float = 1e-9) -> frozenset:
        """Labels of every cell whose polyhedron holds phi(x)."""
        x = np.asarray(x, dtype=float)
        y = np.concatenate([[0.5 * (1.0 + x @ x)], x])
        out = set()
        for i, sys in self.cell_systems.items():
            norms = np.linalg.norm(sys.A, axis=1)
            if np.all((sys.A @ y + sys.b) / norms <= eps * max(1.0, float(np.max(np.abs(y))))):
                out.add(self.labels[i - 1])
        return frozenset(out)


def _cell_system(L, i, d, B, tol=1e-14):
    """Rows L_i - L_j <= 0 for all j != i, the box on x and sigma_1 caps."""
    rows, consts, tags = [], [], []
    ci = fold(L[i])
    for j in range(len(L)):
        if j == i:
            continue
        c = ci - fold(L[j])
        a = np.concatenate([[c[0] - c[1]], c[2:-1]])
        k = c[1]
        if np.max(np.abs(a)) <= tol * max(1.0, abs(k)):
            if k > tol:
                return None
            continue
        rows.append(a)
        consts.append(k)
        tags.append(Tag(SITE, j + 1))
    for t in range(d):
        e = np.zeros(d + 1)
        e[1 + t] = 1.0
        rows += [e, -e]
        consts += [-B, -B]
        tags += [BOX_TAG, BOX_TAG]
    sys = ReducedSystem(np.array(rows), np.array(consts), tags, d, has_radius=False)
    return sys.extend(*sigma1_caps(d, B, has_radius=False))


def _meets_paraboloid(p, sec):
    """Whether the cell polyhedron reaches the paraboloid."""
    if len(sec.points):
        return True
    qv = sec.quad(p.vertices)
    if qv.max() < 0.0:
        return False
    if qv.min() <= 0.0:
        return True
    # q is convex here; its minimum may sit inside the polytope
    A, b = p.system.A, p.system.b
    res = minimize(sec.quad, p.interior, jac=sec.quad.grad, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": lambda y: -(A @ y + b),
                                 "jac": lambda y: -A}])
    return bool(res.success and sec.quad(res.x) <= 0.0)


def minimization_diagram(fs, box, *, order_k: int = 1, seed: int = 0,
                         backend: str | None = None,
                         eps: float = EPS_FEAS) -> MinimizationDiagram:
    """Minimization (or order-k) diagram of a quadratic family inside a box."""
    fs = list(fs)
    if len(fs) < 2:
        raise InvalidInputError("a minimization diagram needs at least 2 functions")
    d = fs[0].dim
    if d < 2 or any(f.dim != d for f in fs):
        raise InvalidInputError("functions must share a dimension d >= 2")
    B = float(getattr(box, "B", box))
    BoundingBox(B)
    k = int(order_k)
    family = order_k_family(fs, k) if k > 1 else fs
    labels = tuple(order_k_labels(len(fs), k)) if k > 1 else tuple(range(1, len(fs) + 1))
    L = [quadratic_to_functional(f).avec for f in family]

    raw_pts, raw_idx, edges, cells, systems = [], [], [], [], {}
    for i in range(len(family)):
        sys = _cell_system(L, i, d, B)
        if sys is None:
            continue
        try:
            y, _ = feasible_point(sys, eps)
            p = halfspace_intersection(sys, y, seed=seed, backend=backend, eps=eps)
        except (InfeasibleSystemError, DegenerateInputError):
            continue
        sec = QuadricSection(p, B, eps)
        if not _meets_paraboloid(p, sec):
            continue
        cells.append(i + 1)
        systems[i + 1] = sys
        local = {}
        for j in range(len(sec.points)):
            rows = sec.tight(j)
            if sec.all_site(rows) and rows:
                local[j] = len(raw_pts)
                raw_pts.append(sec.points[j][1:])
                raw_idx.append({i + 1} | {p.tags[r].site_id for r in rows})

        def mine(closure, i=i, p=p):
            # each arc lies in every cell it bounds; the lowest index emits it
            return all(p.tags[r].site_id > i + 1 for r in closure)

        for closure, ends, ys in sec.arcs(mine):
            idx = frozenset({i + 1} | {p.tags[r].site_id for r in closure})
            ends = tuple(e if e == CLOSED else local.get(e, BOUNDARY) for e in ends)
            edges.append((ends, idx, ys[:, 1:].copy()))

    # vertices found from several cells coincide
    vertices, vid = [], {}
    if raw_pts:
        P = np.array(raw_pts)
        scale = max(1.0, float(np.max(np.abs(P))))
        groups = _components(len(P), sorted(cKDTree(P).query_pairs(MERGE_TOL * scale)))
        groups.sort(key=lambda g: tuple(np.round(P[g].mean(axis=0), 12)))
        for n, g in enumerate(groups):
            ind = frozenset().union(*(raw_idx[t] for t in g))
            vertices.append(MDVertex(P[g].mean(axis=0), frozenset(labels[t - 1] for t in ind)))
            for t in g:
                vid[t] = n
    out_edges = []
    for ends, idx, poly in edges:
        ends = tuple(vid[e] if isinstance(e, int) else e for e in ends)
        out_edges.append(MDEdge(ends, frozenset(labels[t - 1] for t in idx), poly))
    out_edges.sort(key=lambda e: (sorted(map(str, e.indices)), str(e.endpoints),
                                  tuple(np.round(e.polyline[len(e.polyline) // 2], 12))))
    return MinimizationDiagram(vertices=tuple(vertices), edges=tuple(out_edges),
                               cells=tuple(labels[i - 1] for i in cells), order_k=k,
                               labels=labels, functions=tuple(family), box=B,
                               cell_systems=systems)


def affine_box(fs, margin: float = 4.0) -> BoundingBox:
    """Box sized from the function anchors q (and 1 as a floor)."""
    extent = max([1.0] + [float(np.max(np.abs(f.q))) for f in fs if f.a != 0.0])
    return BoundingBox(margin * extent)
