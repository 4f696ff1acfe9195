"""Pure-Python incremental convex hull (reference backend).

Mirrors the compiled kernel in ``_chull.pyx`` step for step; the two must
return the same facet set for the same input.
"""
import numpy as np

from .predicates import FILTER_REL, float_orientation_batch


def _orient_many(points, verts, qs, orienter):
    """Orientation signs of (verts, q) for every q in qs."""
    s = float_orientation_batch(points[verts][None, :, :] - points[qs][:, None, :])
    for i in np.flatnonzero(s == 0):
        s[i] = orienter.exact(list(verts) + [int(qs[i])])
    return s


def _orient_one(points, verts, q, orienter, interior=None):
    x = interior if q < 0 else points[q]
    A = points[verts] - x
    bound = float(np.prod(np.sqrt(np.einsum("ij,ij->i", A, A))))
    det = float(np.linalg.det(A))
    if abs(det) > FILTER_REL * bound:
        return 1 if det > 0 else -1
    return orienter.exact(list(verts) + [q])


def incremental_hull(points, order, simplex, orienter):
    """Convex hull of `points` (m x D) by randomized incremental insertion.

    `simplex` holds D+1 affinely independent point indices, `order` the
    insertion order of the rest. Returns (facets, neighbors): facet f has
    vertex indices facets[f] and neighbors[f][k] is the facet across the
    ridge opposite facets[f][k].
    """
    points = np.ascontiguousarray(points, dtype=float)
    m, D = points.shape
    o = orienter.interior

    fv, fn, side, alive, outside = [], [], [], [], []
    owner = np.full(m, -1, dtype=np.int64)

    def side_of(verts):
        return _orient_one(points, verts, -1, orienter, o)

    for i in range(D + 1):
        verts = [simplex[j] for j in range(D + 1) if j != i]
        fv.append(verts)
        fn.append([j for j in range(D + 1) if j != i])
        side.append(side_of(verts))
        alive.append(True)
        outside.append([])
    owner[list(simplex)] = -2

    pool = np.array([q for q in order if owner[q] == -1], dtype=np.int64)
    for f in range(D + 1):
        if not len(pool):
            break
        vis = _orient_many(points, fv[f], pool, orienter) == -side[f]
        owner[pool[vis]] = f
        outside[f].extend(pool[vis].tolist())
        pool = pool[~vis]

    for p in order:
        p = int(p)
        f0 = owner[p]
        if f0 < 0:
            continue
        status = {f0: True}
        visible = [f0]
        horizon = []
        stack = [f0]
        while stack:
            f = stack.pop()
            for k in range(D):
                g = fn[f][k]
                st = status.get(g)
                if st is None:
                    st = _orient_one(points, fv[g], p, orienter) == -side[g]
                    status[g] = st
                    if st:
                        visible.append(g)
                        stack.append(g)
                if not st:
                    horizon.append((f, k, g))

        new = []
        ridges = {}
        for f, k, g in horizon:
            verts = list(fv[f])
            verts[k] = p
            nf = len(fv)
            neigh = [-1] * D
            neigh[k] = g
            fv.append(verts)
            fn.append(neigh)
            gn = fn[g]
            gn[gn.index(f)] = nf
            side.append(side_of(verts))
            alive.append(True)
            outside.append([])
            new.append(nf)
            for j in range(D):
                if j == k:
                    continue
                key = tuple(sorted(v for i, v in enumerate(verts) if i != j and i != k))
                other = ridges.pop(key, None)
                if other is None:
                    ridges[key] = (nf, j)
                else:
                    of, oj = other
                    neigh[j] = of
                    fn[of][oj] = nf
        if ridges:
            raise RuntimeError("unmatched ridges while inserting a point")

        orphans = []
        for f in visible:
            alive[f] = False
            orphans.extend(outside[f])
            outside[f] = []
        owner[p] = -2
        pool = np.array([q for q in orphans if q != p], dtype=np.int64)
        owner[pool] = -1
        for nf in new:
            if not len(pool):
                break
            vis = _orient_many(points, fv[nf], pool, orienter) == -side[nf]
            owner[pool[vis]] = nf
            outside[nf].extend(pool[vis].tolist())
            pool = pool[~vis]

    keep = [f for f in range(len(fv)) if alive[f]]
    remap = {f: i for i, f in enumerate(keep)}
    facets = np.array([fv[f] for f in keep], dtype=np.int64)
    neighbors = np.array([[remap[g] for g in fn[f]] for f in keep], dtype=np.int64)
    return facets, neighbors
