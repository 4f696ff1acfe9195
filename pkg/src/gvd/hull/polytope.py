"""Halfspace intersection through the dual convex hull."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from ..errors import DegenerateInputError, InvalidInputError
from . import backends
from .predicates import Orienter, exact_orientation
from .system import EPS_FEAS, ReducedSystem

MERGE_TOL = 1e-9


@dataclass(frozen=True)
class Polytope:
    """Bounded polytope {y : A y + b <= 0} with its face lattice down to edges.

    ``tight[v]`` is the set of row indices whose hyperplane contains vertex v,
    ``facets[k]`` the set of vertices on row k, and every edge is a triple
    (u, v, support) with support = tight[u] & tight[v].
    """
    system: ReducedSystem
    vertices: np.ndarray
    tight: tuple
    edges: tuple
    interior: np.ndarray
    facets: dict = field(repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.system.ambient_dim

    @property
    def tags(self) -> tuple:
        return self.system.tags

    def tag_set(self, rows) -> frozenset:
        return frozenset(self.system.tags[k] for k in rows)

    def vertices_on(self, rows) -> frozenset:
        """Vertices lying on every row in `rows`."""
        rows = sorted(rows, key=lambda k: len(self.facets.get(k, ())))
        if not rows:
            return frozenset(range(len(self.vertices)))
        out = set(self.facets.get(rows[0], ()))
        for k in rows[1:]:
            out &= self.facets.get(k, frozenset())
            if not out:
                break
        return frozenset(out)

    def max_residual(self) -> float:
        if not len(self.vertices):
            return 0.0
        A, b = self.system.A, self.system.b
        norms = np.linalg.norm(A, axis=1)
        r = (self.vertices @ A.T + b) / norms
        return float(np.max(r))

    def two_faces(self):
        """2-dimensional faces as (support rows, vertex ids, edge indices)."""
        scale = max(1.0, float(np.max(np.abs(self.vertices)))) if len(self.vertices) else 1.0
        seen = {}
        for e, (u, v, S) in enumerate(self.edges):
            for k in sorted(S):
                T = S - {k}
                V = self.vertices_on(T)
                if len(V) < 3:
                    continue
                closure = frozenset.intersection(*(self.tight[w] for w in V))
                if closure in seen:
                    continue
                pts = self.vertices[sorted(V)]
                sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
                if len(sv) < 2 or sv[1] <= 1e-9 * scale or (len(sv) > 2 and sv[2] > 1e-7 * scale):
                    seen[closure] = None
                    continue
                seen[closure] = V
        by_vertex = {}
        for i, (u, v, _) in enumerate(self.edges):
            by_vertex.setdefault(u, []).append(i)
        faces = []
        for closure, V in seen.items():
            if V is None:
                continue
            es = sorted(i for u in V for i in by_vertex.get(u, ()) if self.edges[i][1] in V)
            faces.append((closure, tuple(sorted(V)), tuple(es)))
        faces.sort(key=lambda f: (sorted(f[0]), f[1]))
        return faces


def _incident(tight, n_rows):
    facets = {}
    for v, T in enumerate(tight):
        for k in T:
            facets.setdefault(k, set()).add(v)
    return {k: frozenset(vs) for k, vs in facets.items()}


def initial_simplex(P: np.ndarray, candidates=None):
    """Greedy D+1 points spanning a full-dimensional simplex.

    Only rows in `candidates` (default: all) are considered.
    """
    m, D = P.shape
    if m < D + 1:
        raise DegenerateInputError("too few inequalities for a bounded polytope")
    pool = np.arange(m) if candidates is None else np.asarray(candidates)
    chosen = _greedy_simplex(P[pool])
    if chosen is None:
        raise DegenerateInputError("dual points are affinely dependent")
    return [int(pool[i]) for i in chosen]


def _greedy_simplex(P):
    m, D = P.shape
    if m < D + 1:
        return None
    i0 = int(np.argmin(P[:, 0]))
    chosen = [i0]
    basis = np.zeros((0, D))
    R0 = P - P[i0]
    for _ in range(D):
        R = R0 - (R0 @ basis.T) @ basis if len(basis) else R0.copy()
        dist = np.linalg.norm(R, axis=1)
        dist[chosen] = -1.0
        j = int(np.argmax(dist))
        if dist[j] <= 0.0:
            return None
        chosen.append(j)
        u = R[j] / dist[j]
        if len(basis):
            u = u - basis.T @ (basis @ u)
            u /= np.linalg.norm(u)
        basis = np.vstack([basis, u])
    if exact_orientation(P[chosen]) == 0:
        return None
    return chosen


def dual_points(system: ReducedSystem, interior):
    A, b = system.A, system.b
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        raise InvalidInputError("reduced system has an all-zero row")
    An = A / norms[:, None]
    bn = b / norms
    slack = -(An @ interior + bn)
    if np.any(slack <= 0):
        raise InvalidInputError("interior point is not strictly feasible")
    return An / slack[:, None], An, bn


def _vertex_from(P_rows):
    z, *_ = np.linalg.lstsq(P_rows, np.ones(len(P_rows)), rcond=None)
    return z


def _components(n, links):
    ds = DisjointSet(range(n))
    for a, b in links:
        ds.merge(a, b)
    return sorted((sorted(c) for c in ds.subsets()), key=lambda c: c[0])


def _tight_rows(Y, An, bn, eps, chunk=2048):
    out = []
    for i in range(0, len(Y), chunk):
        y = Y[i:i + chunk]
        r = np.abs(y @ An.T + bn)
        tol = eps * np.maximum(1.0, np.max(np.abs(y), axis=1))
        out.extend(np.flatnonzero(row <= t).tolist() for row, t in zip(r, tol))
    return out


def _true_lattice(P, An, bn, interior, facets, neighbors, orienter, eps):
    """Fuse SoS facets into the unperturbed face lattice.

    Simplices whose points are affinely dependent (flat) carry no vertex of
    their own; they are contracted and their neighbours reconnected wherever
    the shared tight rows still cut out a line.
    """
    F, D = facets.shape
    flat = orienter.coplanar_batch(np.hstack([facets, np.full((F, 1), -1)]))

    # ridges (f, g) with f < g, and the vertex of g opposite the shared ridge
    f_idx, k_idx = np.nonzero(neighbors > np.arange(F)[:, None])
    g_idx = neighbors[f_idx, k_idx]
    solid_pair = ~flat[f_idx] & ~flat[g_idx]
    in_f = (facets[g_idx][:, :, None] == facets[f_idx][:, None, :]).any(axis=2)
    w = facets[g_idx][np.arange(len(g_idx)), np.argmin(in_f, axis=1)]
    cand = np.flatnonzero(solid_pair)
    same = orienter.coplanar_batch(np.hstack([facets[f_idx[cand]], w[cand, None]]))
    links = list(zip(f_idx[cand[same]].tolist(), g_idx[cand[same]].tolist()))

    groups = [g for g in _components(F, links) if not flat[g[0]]]
    group_of = np.full(F, -1, dtype=np.int64)
    Y = np.empty((len(groups), D))
    rows_of = []
    single = [i for i, fs in enumerate(groups) if len(fs) == 1]
    if single:
        fs = [groups[i][0] for i in single]
        Y[single] = np.linalg.solve(P[facets[fs]], np.ones((len(fs), D, 1)))[:, :, 0]
    for i, fs in enumerate(groups):
        group_of[fs] = i
        rows = sorted({int(v) for f in fs for v in facets[f]})
        if len(fs) > 1:
            Y[i] = _vertex_from(P[rows])
        rows_of.append(rows)
    Y += interior

    scale = max(1.0, float(np.max(np.abs(Y))))
    clusters = _components(len(Y), sorted(cKDTree(Y).query_pairs(MERGE_TOL * scale)))
    vid = np.empty(len(Y), dtype=np.int64)
    verts = np.empty((len(clusters), D))
    for j, cl in enumerate(clusters):
        vid[cl] = j
        verts[j] = Y[cl].mean(axis=0)
    geometric = _tight_rows(verts, An, bn, eps)
    tight = []
    for j, cl in enumerate(clusters):
        rows = set(geometric[j])
        for i in cl:
            rows.update(rows_of[i])
        tight.append(frozenset(rows))

    both = ~flat[f_idx] & ~flat[g_idx]
    u = vid[group_of[f_idx[both]]]
    v = vid[group_of[g_idx[both]]]
    keep = u != v
    pairs = set(zip(np.minimum(u, v)[keep].tolist(), np.maximum(u, v)[keep].tolist()))

    if flat.any():
        both_flat = flat[f_idx] & flat[g_idx]
        flat_links = list(zip(f_idx[both_flat].tolist(), g_idx[both_flat].tolist()))
        for comp in _components(F, flat_links):
            if not flat[comp[0]]:
                continue
            around = sorted({int(vid[group_of[g]]) for f in comp for g in neighbors[f]
                             if not flat[g]})
            for i, a in enumerate(around):
                for b in around[i + 1:]:
                    if (a, b) not in pairs and _spans_line(An, tight[a] & tight[b], D):
                        pairs.add((a, b))

    edges = tuple((int(a), int(b), tight[a] & tight[b]) for a, b in sorted(pairs))
    return verts, tight, edges


def _spans_line(An, rows, D) -> bool:
    if len(rows) < D - 1:
        return False
    sv = np.linalg.svd(An[sorted(rows)], compute_uv=False)
    return sv[D - 2] > 1e-9 and (len(sv) < D or sv[D - 1] <= 1e-9)


def halfspace_intersection(system: ReducedSystem, interior, *, seed: int = 0,
                           merge: bool = True, backend: str | None = None,
                           eps: float = EPS_FEAS) -> Polytope:
    """Vertices and edges of {A y + b <= 0} given a strictly interior point.

    Each row becomes the dual point a_k / s_k (s_k the slack at the interior
    point); facets of the dual hull are primal vertices and dual ridges are
    primal edges. With ``merge`` (the default) SoS facets lying on a common
    hyperplane are fused and vertices closer than 1e-9 are identified, so the
    result is the true face lattice. Without it every vertex has exactly
    ambient_dim tight rows.
    """
    interior = np.asarray(interior, dtype=float)
    P, An, bn = dual_points(system, interior)
    m, D = P.shape
    # Box rows go first: their dual hull already surrounds the origin, so no
    # intermediate facet can pass through it.
    rng = np.random.default_rng(seed)
    frame = np.array([k for k, t in enumerate(system.tags) if not t.is_site], dtype=np.int64)
    rest = np.array([k for k, t in enumerate(system.tags) if t.is_site], dtype=np.int64)
    order = np.concatenate([frame[rng.permutation(len(frame))],
                            rest[rng.permutation(len(rest))]])
    simplex = None
    if len(frame) > D:
        simplex = _greedy_simplex(P[frame])
        if simplex is not None:
            simplex = [int(frame[i]) for i in simplex]
    if simplex is None:
        simplex = initial_simplex(P)
    orienter = Orienter(P, P[simplex].mean(axis=0))
    facets, neighbors = backends.get(backend)(P, order, simplex, orienter)

    if merge:
        verts, tight, edges = _true_lattice(P, An, bn, interior, facets, neighbors,
                                            orienter, eps)
    else:
        verts = np.array([_vertex_from(P[f]) for f in facets]) + interior
        tight = [frozenset(int(v) for v in f) for f in facets]
        pairs = {}
        for f in range(len(facets)):
            for k in range(D):
                g = int(neighbors[f, k])
                if f < g:
                    pairs[f, g] = tight[f] - {int(facets[f][k])}
        edges = tuple((u, v, S) for (u, v), S in sorted(pairs.items()))

    tight = tuple(tight)
    return Polytope(system=system, vertices=verts, tight=tight, edges=edges,
                    interior=interior, facets=_incident(tight, m))


def diagram_edges(p: Polytope):
    """Edges with at most one box or radius-sign row in their support."""
    out = []
    for u, v, S in p.edges:
        if sum(1 for k in S if not p.tags[k].is_site) <= 1:
            out.append((u, v, S))
    return out
