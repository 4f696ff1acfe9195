"""Intersect the sphere polytope with the Lie quadric and read off the diagram.

Vertices are quadric roots on 1-faces whose supporting rows are all sites.
Edges are the conic arcs cut from 2-faces with all-site support; each arc is
sampled through a pencil of lines based at one of its boundary roots.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .dataset import DataSet, assemble_system
from .hull import (EPS_FEAS, BoundingBox, Polytope, choose_bounding_box,
                   diagram_edges, feasible_point, halfspace_intersection,
                   normalize_slice)
from .lie_geometry import EPS_PRED, lie_product, signature

EPS_T = 1e-10
ROOT_DEDUP = 1e-9
LEAD_TOL = 1e-14
MERGE_TOL = 1e-9
SAMPLE_DIVISIONS = 256
BOUNDARY = "boundary"
CLOSED = "closed"


@dataclass(frozen=True)
class QuadricRoot:
    t: float
    point: np.ndarray


@dataclass(frozen=True)
class DiagramVertex:
    center: np.ndarray
    radius: float
    tight_sites: frozenset
    lie_coords: np.ndarray


@dataclass(frozen=True)
class DiagramEdge:
    """A diagram edge; an endpoint is a vertex id, BOUNDARY or CLOSED (loops)."""
    endpoints: tuple
    defining_sites: frozenset
    sample_polyline: np.ndarray


@dataclass(frozen=True)
class GeneralizedDiagram:
    vertices: tuple
    edges: tuple
    dimension: int
    site_table: tuple
    cells: frozenset = frozenset()
    box: float | None = None
    polytope: Polytope | None = field(default=None, repr=False, compare=False)


def _solve_quadratic(a, b, c):
    """Real roots of a t^2 + b t + c, tolerant of a vanishing lead."""
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0:
        return []
    if abs(a) <= LEAD_TOL * scale:
        return [] if b == 0.0 else [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        if disc < -1e-12 * max(b * b, abs(4.0 * a * c)):
            return []
        disc = 0.0
    sq = np.sqrt(disc)
    q = -0.5 * (b + (sq if b >= 0 else -sq))
    if q == 0.0:
        return [0.0]
    return [q / a, c / q]


def edge_quadric_roots(x0, x1, eps_t: float = EPS_T) -> tuple:
    """Points of the segment [x0, x1] (Lie coordinates) on the quadric.

    Returns up to two QuadricRoot(t, point) with t in [0, 1] after clamping
    roots that land within `eps_t` outside the segment.
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    dx = x1 - x0
    a = lie_product(dx, dx)
    b = 2.0 * lie_product(x0, dx)
    c = lie_product(x0, x0)
    ts = []
    for t in sorted(_solve_quadratic(a, b, c)):
        if -eps_t <= t <= 1.0 + eps_t:
            t = min(1.0, max(0.0, t))
            if not ts or abs(t - ts[-1]) > ROOT_DEDUP:
                ts.append(t)
    return tuple(QuadricRoot(t, x0 + t * dx) for t in ts)


class _Quadric:
    """The quadric pulled back to slice coordinates: y.M.y + m.y + k."""

    def __init__(self, system):
        D = system.ambient_dim
        l0 = system.lift(np.zeros(D))
        L = system.lift(np.eye(D)) - l0
        G = signature(len(l0))
        self.M = (L * G) @ L.T
        self.m = 2.0 * (L * G) @ l0
        self.k = float(l0 @ (G * l0))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.einsum("...i,ij,...j->...", y, self.M, y) + y @ self.m + self.k

    def grad(self, y):
        return 2.0 * self.M @ y + self.m


def _normalized(system):
    norms = np.linalg.norm(system.A, axis=1)
    return system.A / norms[:, None], system.b / norms


def _tight_at(An, bn, y, eps):
    return np.abs(An @ y + bn) <= eps * max(1.0, float(np.max(np.abs(y))))


def _polish(y, An, bn, rows, quad, steps=4):
    """Gauss-Newton on the tight rows plus the quadric."""
    rows = sorted(rows)
    if len(rows) < len(y) - 1:
        return y
    for _ in range(steps):
        J = np.vstack([An[rows], quad.grad(y)])
        r = np.concatenate([An[rows] @ y + bn[rows], [quad(y)]])
        if not np.all(np.isfinite(r)):
            break
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        y = y + step
        if np.max(np.abs(step)) <= 1e-16 * max(1.0, float(np.max(np.abs(y)))):
            break
    return y


class _Nodes:
    """Quadric roots on 1-faces, merged across edges."""

    def __init__(self, p: Polytope, quad, eps):
        self.p = p
        sys = p.system
        self.An, self.bn = _normalized(sys)
        raw, owner = [], []
        for e, (u, v, S) in enumerate(p.edges):
            x0, x1 = sys.lift(p.vertices[u]), sys.lift(p.vertices[v])
            for root in edge_quadric_roots(x0, x1):
                raw.append(sys.reduce(root.point))
                owner.append(e)
        self.on_edge = {}
        if not raw:
            self.y = np.zeros((0, sys.ambient_dim))
            self.tight = []
            return
        raw = np.array(raw)
        lifted = sys.lift(raw)
        scale = max(1.0, float(np.max(np.abs(lifted))))
        from .hull.polytope import _components
        clusters = _components(len(raw), sorted(cKDTree(lifted).query_pairs(MERGE_TOL * scale)))
        ys, tight = [], []
        for j, cl in enumerate(clusters):
            rows = set()
            for i in cl:
                rows |= p.edges[owner[i]][2]
                self.on_edge.setdefault(owner[i], []).append(j)
            y = _polish(raw[cl].mean(axis=0), self.An, self.bn, rows, quad)
            rows |= set(np.flatnonzero(_tight_at(self.An, self.bn, y, eps)).tolist())
            ys.append(y)
            tight.append(frozenset(rows))
        self.y = np.array(ys)
        self.tight = tight
        for e in self.on_edge:
            self.on_edge[e] = sorted(set(self.on_edge[e]))

    def is_vertex(self, j):
        tags = [self.p.tags[k] for k in self.tight[j]]
        return all(t.is_site for t in tags) and len(tags) >= 2


class _Tracer:
    def __init__(self, p, quad, nodes, delta, eps):
        self.p, self.quad, self.nodes = p, quad, nodes
        self.sys = p.system
        self.delta = delta
        self.An, self.bn = nodes.An, nodes.bn
        self.d = self.sys.dimension
        self.scale = max(1.0, float(np.max(np.abs(p.vertices)))) if len(p.vertices) else 1.0
        self.tol = max(eps, 1e-9) * self.scale

    def inside(self, y):
        return bool(np.all(self.An @ y + self.bn <= self.tol))

    def _cr(self, y):
        return y[1:] if self.sys.has_radius else np.append(y[1:], 0.0)

    def face(self, closure, V, E):
        pts = self.p.vertices[list(V)]
        o = pts.mean(axis=0)
        U = np.linalg.svd(pts - o)[2][:2].T
        M, m = self.quad.M, self.quad.m
        K = U.T @ M @ U
        lin = 2.0 * o @ M @ U + m @ U
        k0 = float(self.quad(o))
        roots = sorted({j for e in E for j in self.nodes.on_edge.get(e, ())})
        S = [(j, U.T @ (self.nodes.y[j] - o)) for j in roots]
        to_y = lambda s: o + U @ s
        if np.max(np.abs(K)) <= 1e-12 * max(1.0, np.max(np.abs(lin))):
            return self._line(S, to_y)
        if not S:
            s0 = self._seed(K, lin, k0, pts, o, U)
            if s0 is None:
                return []
            S = [(None, s0)]
        # base the pencil on a root where the conic is smooth
        grads = [np.linalg.norm(2.0 * K @ s + lin) for _, s in S]
        b = int(np.argmax(grads))
        if grads[b] <= 1e-12 * self.scale:
            return []
        j0, s0 = S[b]
        g = 2.0 * K @ s0 + lin
        th0 = np.arctan2(g[1], g[0]) + np.pi / 2.0

        def at(phi):
            u = np.array([np.cos(th0 + phi), np.sin(th0 + phi)])
            den = u @ K @ u
            num = -(2.0 * s0 @ K @ u + lin @ u)
            if abs(den) <= 1e-14 * max(1.0, abs(num)):
                return None
            return s0 + (num / den) * u

        marks = [(0.0, j0)]
        for j, s in S:
            if j == j0:
                continue
            w = s - s0
            if np.linalg.norm(w) <= 1e-12 * self.scale:
                continue
            phi = (np.arctan2(w[1], w[0]) - th0) % np.pi
            marks.append((phi, j))
        marks.sort(key=lambda t: t[0])
        marks.append((np.pi, j0))

        arcs = []
        for (a, ja), (c, jc) in zip(marks[:-1], marks[1:]):
            if c - a <= 1e-12:
                continue
            mid = at(0.5 * (a + c))
            if mid is None or not self.inside(to_y(mid)):
                continue
            poly = self._sample(at, to_y, a, c, ja, jc)
            if poly is None:
                continue
            ends = tuple(CLOSED if j is None else j for j in (ja, jc))
            arcs.append((ends, poly))
        return arcs

    def _seed(self, K, lin, k0, pts, o, U):
        """A conic point inside the face when no boundary root exists."""
        P2 = (pts - o) @ U
        reach = float(np.max(np.linalg.norm(P2, axis=1)))
        for th in np.linspace(0.0, np.pi, 13)[:-1]:
            u = np.array([np.cos(th), np.sin(th)])
            for t in _solve_quadratic(u @ K @ u, lin @ u, k0):
                if abs(t) <= reach and self.inside(o + U @ (t * u)):
                    return t * u
        return None

    def _line(self, S, to_y):
        if len(S) < 2:
            return []
        s0 = S[0][1]
        far = max(S, key=lambda js: np.linalg.norm(js[1] - s0))[1]
        u = far - s0
        S = sorted(S, key=lambda js: float((js[1] - s0) @ u))
        arcs = []
        for (ja, sa), (jc, sc) in zip(S[:-1], S[1:]):
            if ja == jc or not self.inside(to_y(0.5 * (sa + sc))):
                continue
            n = max(2, int(np.ceil(np.linalg.norm(self._cr(to_y(sc)) - self._cr(to_y(sa))) / self.delta)) + 1)
            ys = [to_y(sa + t * (sc - sa)) for t in np.linspace(0.0, 1.0, n)]
            ys[0], ys[-1] = self.nodes.y[ja], self.nodes.y[jc]
            arcs.append(((ja, jc), np.array(ys)))
        return arcs

    def _sample(self, at, to_y, a, c, ja, jc):
        ys = {}

        def point(phi):
            if phi not in ys:
                s = at(phi)
                ys[phi] = None if s is None else to_y(s)
            return ys[phi]

        def refine(lo, hi, depth):
            p0, p1 = point(lo), point(hi)
            if p0 is None or p1 is None:
                return False
            if depth >= 24 or np.linalg.norm(self._cr(p1) - self._cr(p0)) <= self.delta:
                return True
            mid = 0.5 * (lo + hi)
            return refine(lo, mid, depth + 1) and refine(mid, hi, depth + 1)

        grid = np.linspace(a, c, 9)
        for lo, hi in zip(grid[:-1], grid[1:]):
            if not refine(lo, hi, 0):
                return None
        phis = sorted(ys)
        out = [ys[f] for f in phis]
        if ja is not None:
            out[0] = self.nodes.y[ja]
        if jc is not None:
            out[-1] = self.nodes.y[jc]
        out = np.array(out)
        if np.any(out @ self.An.T + self.bn > 1e3 * self.tol):
            return None
        return out


def _sites_of(p, rows):
    return frozenset(p.tags[k].site_id for k in rows if p.tags[k].is_site)


def _cells(p: Polytope, quad, nodes):
    """Site ids whose facet meets the quadric.

    q is indefinite, so same-sign facet vertices do not rule a facet out; a
    root on any of its edges settles it.
    """
    if not len(p.vertices):
        return frozenset()
    qv = quad(p.vertices)
    out = set()
    for k, V in p.facets.items():
        if p.tags[k].is_site and V:
            vals = qv[list(V)]
            if vals.min() <= 0.0 <= vals.max():
                out.add(p.tags[k].site_id)
    for e in nodes.on_edge:
        out.update(p.tags[k].site_id for k in p.edges[e][2] if p.tags[k].is_site)
    return frozenset(out)


class QuadricSection:
    """Roots and traced arcs of a polytope cut by the quadric."""

    def __init__(self, p: Polytope, box: float, eps: float = EPS_FEAS):
        self.p = p
        self.quad = _Quadric(p.system)
        self.nodes = _Nodes(p, self.quad, eps)
        self.tracer = _Tracer(p, self.quad, self.nodes, 2.0 * box / SAMPLE_DIVISIONS, eps)

    @property
    def points(self) -> np.ndarray:
        """Merged roots in slice coordinates."""
        return self.nodes.y

    def tight(self, j) -> frozenset:
        return self.nodes.tight[j]

    def all_site(self, rows) -> bool:
        return all(self.p.tags[k].is_site for k in rows)

    def arcs(self, keep=None):
        """(closure, endpoints, slice points) for 2-faces with all-site support.

        Endpoints are root indices, or CLOSED for a loop. `keep(closure)` may
        veto further faces.
        """
        for closure, V, E in self.p.two_faces():
            if not self.all_site(closure) or (keep is not None and not keep(closure)):
                continue
            for ends, ys in self.tracer.face(closure, V, E):
                yield closure, ends, ys

    def cells(self):
        return _cells(self.p, self.quad, self.nodes)


def build_diagram(p: Polytope, ds: DataSet, *, box: float | None = None,
                  eps: float = EPS_FEAS) -> GeneralizedDiagram:
    """Project P intersected with the quadric down to centers in R^d."""
    sys = p.system
    d = ds.dimension
    if box is None:
        box = float(np.max(np.abs(p.vertices[:, 1:1 + d]))) if len(p.vertices) else 1.0
    sec = QuadricSection(p, box, eps)

    keep = [j for j in range(len(sec.points)) if sec.nodes.is_vertex(j)]
    lifted = sys.lift(sec.points) if len(sec.points) else np.zeros((0, d + 3))
    keep.sort(key=lambda j: tuple(np.round(lifted[j, 2:], 12)))
    vid = {j: i for i, j in enumerate(keep)}
    vertices = []
    for j in keep:
        x = lifted[j]
        vertices.append(DiagramVertex(center=x[2:2 + d].copy(), radius=max(float(x[-1]), 0.0),
                                      tight_sites=_sites_of(p, sec.tight(j)), lie_coords=x))

    edges = []
    for closure, ends, ys in sec.arcs():
        ends = tuple(e if e == CLOSED else vid.get(e, BOUNDARY) for e in ends)
        edges.append(DiagramEdge(ends, _sites_of(p, closure), sys.lift(ys)[:, 2:2 + d]))
    edges.sort(key=_edge_key)
    return GeneralizedDiagram(vertices=tuple(vertices), edges=tuple(edges), dimension=d,
                              site_table=ds.sites, cells=sec.cells(), box=box, polytope=p)


def _edge_key(e):
    mid = e.sample_polyline[len(e.sample_polyline) // 2]
    return (sorted(e.defining_sites), str(e.endpoints), tuple(np.round(mid, 12)))


def extremal_polytope(ds: DataSet, *, margin: float = 4.0, seed: int = 0,
                      backend: str | None = None, eps: float = EPS_FEAS):
    """Box, inequality system, interior point and polytope for a data set."""
    box = choose_bounding_box(ds, margin)
    system = normalize_slice(assemble_system(ds, box), box)
    y, _ = feasible_point(system, eps)
    return box, halfspace_intersection(system, y, seed=seed, backend=backend, eps=eps)


def compute_diagram(ds: DataSet, *, margin: float = 4.0, seed: int = 0,
                    backend: str | None = None, eps: float = EPS_FEAS) -> GeneralizedDiagram:
    box, p = extremal_polytope(ds, margin=margin, seed=seed, backend=backend, eps=eps)
    return build_diagram(p, ds, box=box.B, eps=eps)


def _radius_interval(C, k, x, eps):
    """Feasible radii at center x for rows C.sigma + k <= 0, with tight rows.

    Each row restricted to the center x is a r^2 + b r + g with a and b of one
    sign, so it bounds r from one side.
    """
    xx = float(x @ x)
    a = 0.5 * (C[:, 1] - C[:, 0])
    b = C[:, -1]
    g = 0.5 * (C[:, 0] * (1.0 + xx) + C[:, 1] * (1.0 - xx)) + C[:, 2:-1] @ x + k
    lo, hi = 0.0, np.inf
    bounds = []
    for i in range(len(C)):
        rs = [r for r in _solve_quadratic(a[i], b[i], g[i]) if r >= 0.0]
        rising = a[i] > 0 or (a[i] == 0 and b[i] > 0)
        falling = a[i] < 0 or (a[i] == 0 and b[i] < 0)
        if rising:
            r = min(rs) if rs else (-np.inf if g[i] > 0 else np.inf)
            bounds.append((i, "hi", r))
            hi = min(hi, r)
        elif falling:
            r = max(rs) if rs else (np.inf if g[i] > 0 else 0.0)
            bounds.append((i, "lo", r))
            lo = max(lo, r)
        elif g[i] > 0:
            return None, ()
    if lo > hi + eps * max(1.0, abs(hi) if np.isfinite(hi) else 1.0):
        return None, ()
    tight = []
    for i, side, r in bounds:
        ref = hi if side == "hi" else lo
        if np.isfinite(ref) and abs(r - ref) <= eps * max(1.0, abs(ref)):
            tight.append(i)
    return (lo, hi), tuple(tight)


def _slice_functionals(polytope):
    """Polytope rows as folded functionals with sigma_2 eliminated."""
    sys = polytope.system
    n = sys.ambient_dim
    C = np.zeros((len(sys.A), sys.dimension + 3))
    C[:, 0] = sys.A[:, 0]
    C[:, 2:2 + (n - 1)] = sys.A[:, 1:]
    return C, sys.b.copy(), list(sys.tags)


def _site_functionals(ds):
    ineqs = assemble_system(ds, BoundingBox(1.0))[:len(ds.sites)]
    return (np.array([i.coeffs for i in ineqs]), np.array([i.constant for i in ineqs]),
            [i.tag for i in ineqs])


def locate_grid(X, ds: DataSet, polytope: Polytope | None = None,
                eps: float = EPS_PRED) -> np.ndarray:
    """Batched locate: boolean (N, m) over ds.sites, True where a site is tight."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    C, k, tags = _slice_functionals(polytope) if polytope is not None else _site_functionals(ds)
    norms = np.linalg.norm(C, axis=1)
    C, k = C / norms[:, None], k / norms
    xx = np.sum(X * X, axis=1)[:, None]
    a = 0.5 * (C[:, 1] - C[:, 0])
    b = C[:, -1]
    g = 0.5 * (C[:, 0] * (1.0 + xx) + C[:, 1] * (1.0 - xx)) + X @ C[:, 2:-1].T + k
    A = np.broadcast_to(a, g.shape)
    Bm = np.broadcast_to(b, g.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = Bm * Bm - 4.0 * A * g
        sq = np.sqrt(np.maximum(disc, 0.0))
        qq = -0.5 * (Bm + np.where(Bm >= 0, sq, -sq))
        r1 = np.where(A != 0, qq / A, -g / Bm)
        r2 = np.where(A != 0, np.where(qq != 0, g / qq, r1), r1)
    real = (A == 0) & (Bm != 0) | (A != 0) & (disc >= 0)
    r1 = np.where(real & (r1 >= 0), r1, np.nan)
    r2 = np.where(real & (r2 >= 0), r2, np.nan)
    rising = (a > 0) | (a == 0) & (b > 0)
    falling = (a < 0) | (a == 0) & (b < 0)
    pos = g > 0
    with np.errstate(invalid="ignore"):
        up = np.fmin(r1, r2)
        up = np.where(np.isnan(up), np.where(pos, -np.inf, np.inf), up)
        down = np.fmax(r1, r2)
        down = np.where(np.isnan(down), np.where(pos, np.inf, 0.0), down)
    hi = np.where(rising, up, np.inf).min(axis=1)
    lo = np.maximum(0.0, np.where(falling, down, -np.inf).max(axis=1))
    flat = ~(rising | falling)
    fin = np.where(np.isfinite(hi), np.abs(hi), 1.0)
    ok = (lo <= hi + eps * np.maximum(1.0, fin)) & ~np.any(flat & pos, axis=1)
    R = np.where(rising, up, down)
    ref = np.where(rising, hi[:, None], lo[:, None])
    with np.errstate(invalid="ignore"):
        tight = (rising | falling) & np.isfinite(ref) & (
            np.abs(R - ref) <= eps * np.maximum(1.0, np.abs(ref))) & ok[:, None]
    col = {s.id: j for j, s in enumerate(ds.sites)}
    out = np.zeros((len(X), len(ds.sites)), dtype=bool)
    for i, t in enumerate(tags):
        if t.is_site:
            out[:, col[t.site_id]] |= tight[:, i]
    return out


def locate(x, ds: DataSet, polytope: Polytope | None = None, eps: float = EPS_PRED) -> frozenset:
    """Site ids tight at an extremal admissible sphere centered at x.

    Uses the dataset's own inequalities, or the polytope's full row set (box
    included) when one is given. Empty when no admissible sphere has center x.
    """
    x = np.asarray(getattr(x, "coords", x), dtype=float)
    C, k, tags = _slice_functionals(polytope) if polytope is not None else _site_functionals(ds)
    norms = np.linalg.norm(C, axis=1)
    C, k = C / norms[:, None], k / norms
    interval, tight = _radius_interval(C, k, x, eps)
    if interval is None:
        return frozenset()
    return frozenset(tags[i].site_id for i in tight if tags[i].is_site)
