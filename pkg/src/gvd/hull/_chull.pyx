# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled incremental convex hull; same algorithm as _pyhull."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

from .predicates import FILTER_REL

cnp.import_array()

ctypedef cnp.int64_t idx_t


cdef int _orient(const double[:, ::1] P, const idx_t* verts, int D,
                 const double* x, double* buf, double filt) noexcept nogil:
    """Sign of det[P[verts[i]] - x], or 0 when the filter is inconclusive."""
    cdef int i, j, k, piv
    cdef double bound = 1.0, s, det = 1.0, t, f
    for i in range(D):
        s = 0.0
        for j in range(D):
            t = P[verts[i], j] - x[j]
            buf[i * D + j] = t
            s += t * t
        bound *= sqrt(s)
    if bound == 0.0:
        return 0
    for k in range(D):
        piv = k
        t = fabs(buf[k * D + k])
        for i in range(k + 1, D):
            if fabs(buf[i * D + k]) > t:
                t = fabs(buf[i * D + k])
                piv = i
        if t == 0.0:
            return 0
        if piv != k:
            for j in range(D):
                t = buf[k * D + j]
                buf[k * D + j] = buf[piv * D + j]
                buf[piv * D + j] = t
            det = -det
        det *= buf[k * D + k]
        for i in range(k + 1, D):
            f = buf[i * D + k] / buf[k * D + k]
            if f != 0.0:
                for j in range(k + 1, D):
                    buf[i * D + j] -= f * buf[k * D + j]
    if fabs(det) > filt * bound:
        return 1 if det > 0 else -1
    return 0


cdef class _Hull:
    cdef int D, m
    cdef double filt
    cdef object orienter
    cdef const double[:, ::1] P
    cdef double[::1] o
    cdef double[::1] buf
    cdef idx_t cap, nf
    cdef idx_t[:, ::1] fv
    cdef idx_t[:, ::1] fn
    cdef signed char[::1] side
    cdef unsigned char[::1] alive
    cdef idx_t[::1] head
    cdef idx_t[::1] stamp
    cdef unsigned char[::1] vis
    cdef idx_t[::1] nxt
    cdef idx_t[::1] owner

    def __init__(self, P, orienter):
        self.P = P
        self.m = P.shape[0]
        self.D = P.shape[1]
        self.filt = FILTER_REL
        self.orienter = orienter
        self.o = np.ascontiguousarray(orienter.interior, dtype=np.float64)
        self.buf = np.empty(self.D * self.D, dtype=np.float64)
        self.cap = 0
        self.nf = 0
        self._grow(max(64, 16 * self.m))
        self.nxt = np.full(self.m, -1, dtype=np.int64)
        self.owner = np.full(self.m, -1, dtype=np.int64)

    cdef _grow(self, idx_t need):
        cdef idx_t cap = max(need, 2 * self.cap)
        cdef idx_t n = self.nf
        fv = np.zeros((cap, self.D), dtype=np.int64)
        fn = np.zeros((cap, self.D), dtype=np.int64)
        side = np.zeros(cap, dtype=np.int8)
        alive = np.zeros(cap, dtype=np.uint8)
        head = np.full(cap, -1, dtype=np.int64)
        stamp = np.full(cap, -1, dtype=np.int64)
        vis = np.zeros(cap, dtype=np.uint8)
        if n:
            fv[:n] = self.fv[:n]
            fn[:n] = self.fn[:n]
            side[:n] = self.side[:n]
            alive[:n] = self.alive[:n]
            head[:n] = self.head[:n]
            stamp[:n] = self.stamp[:n]
            vis[:n] = self.vis[:n]
        self.fv, self.fn, self.side, self.alive = fv, fn, side, alive
        self.head, self.stamp, self.vis = head, stamp, vis
        self.cap = cap

    cdef int orient_point(self, idx_t f, idx_t q) except? -9:
        cdef int s
        if q < 0:
            s = _orient(self.P, &self.fv[f, 0], self.D, &self.o[0], &self.buf[0], self.filt)
        else:
            s = _orient(self.P, &self.fv[f, 0], self.D, &self.P[q, 0], &self.buf[0], self.filt)
        if s == 0:
            s = self.orienter.exact([int(v) for v in self.fv[f]] + [int(q)])
        return s

    cdef bint visible(self, idx_t f, idx_t q) except -1:
        return self.orient_point(f, q) == -self.side[f]

    cdef idx_t new_facet(self):
        cdef idx_t f = self.nf
        self.nf += 1
        self.alive[f] = 1
        self.head[f] = -1
        return f

    cdef void push(self, idx_t f, idx_t q):
        self.owner[q] = f
        self.nxt[q] = self.head[f]
        self.head[f] = q

    def run(self, idx_t[::1] order, simplex):
        cdef int D = self.D
        cdef idx_t i, j, k, f, g, p, q, nq, f0, nf, kk, jj, a, b, t
        cdef idx_t[::1] pool
        cdef int n_pool, n_new, n_vis, n_hz, n_keys
        cdef idx_t[::1] visible_list
        cdef idx_t[:, ::1] horizon
        cdef idx_t[::1] new_list
        cdef idx_t[:, ::1] keys
        cdef idx_t[::1] key_f
        cdef idx_t[::1] key_s
        cdef bint same
        cdef idx_t insertion = 0

        # initial simplex
        for i in range(D + 1):
            f = self.new_facet()
            kk = 0
            for j in range(D + 1):
                if j != i:
                    self.fv[f, kk] = simplex[j]
                    self.fn[f, kk] = j
                    kk += 1
            self.side[f] = self.orient_point(f, -1)
        for i in range(D + 1):
            self.owner[simplex[i]] = -2

        for i in range(order.shape[0]):
            q = order[i]
            if self.owner[q] != -1:
                continue
            for f in range(D + 1):
                if self.visible(f, q):
                    self.push(f, q)
                    break

        visible_list = np.empty(64, dtype=np.int64)
        horizon = np.empty((64, 3), dtype=np.int64)
        pool = np.empty(self.m, dtype=np.int64)

        for i in range(order.shape[0]):
            p = order[i]
            f0 = self.owner[p]
            if f0 < 0:
                continue
            insertion += 1
            # visible region, grown breadth-first from the owning facet
            n_vis = 0
            n_hz = 0
            self.stamp[f0] = insertion
            self.vis[f0] = 1
            visible_list[0] = f0
            n_vis = 1
            a = 0
            while a < n_vis:
                f = visible_list[a]
                a += 1
                for k in range(D):
                    g = self.fn[f, k]
                    if self.stamp[g] != insertion:
                        self.stamp[g] = insertion
                        self.vis[g] = self.visible(g, p)
                        if self.vis[g]:
                            if n_vis == visible_list.shape[0]:
                                visible_list = np.concatenate([visible_list, np.empty(n_vis, dtype=np.int64)])
                            visible_list[n_vis] = g
                            n_vis += 1
                    if not self.vis[g]:
                        if n_hz == horizon.shape[0]:
                            horizon = np.concatenate([horizon, np.empty((n_hz, 3), dtype=np.int64)])
                        horizon[n_hz, 0] = f
                        horizon[n_hz, 1] = k
                        horizon[n_hz, 2] = g
                        n_hz += 1

            if self.nf + n_hz > self.cap:
                self._grow(self.nf + n_hz)
            new_list = np.empty(n_hz, dtype=np.int64)
            n_keys = n_hz * (D - 1)
            keys = np.empty((n_keys, max(D - 2, 1)), dtype=np.int64)
            key_f = np.empty(n_keys, dtype=np.int64)
            key_s = np.empty(n_keys, dtype=np.int64)
            n_keys = 0
            for t in range(n_hz):
                f = horizon[t, 0]
                k = horizon[t, 1]
                g = horizon[t, 2]
                nf = self.new_facet()
                new_list[t] = nf
                for j in range(D):
                    self.fv[nf, j] = self.fv[f, j]
                    self.fn[nf, j] = -1
                self.fv[nf, k] = p
                self.fn[nf, k] = g
                for j in range(D):
                    if self.fn[g, j] == f:
                        self.fn[g, j] = nf
                        break
                self.side[nf] = self.orient_point(nf, -1)
                for j in range(D):
                    if j == k:
                        continue
                    kk = 0
                    for jj in range(D):
                        if jj != j and jj != k:
                            keys[n_keys, kk] = self.fv[nf, jj]
                            kk += 1
                    _sort_small(&keys[n_keys, 0], D - 2)
                    # match against earlier keys
                    same = False
                    for a in range(n_keys):
                        if key_f[a] < 0:
                            continue
                        same = True
                        for b in range(D - 2):
                            if keys[a, b] != keys[n_keys, b]:
                                same = False
                                break
                        if same:
                            self.fn[nf, j] = key_f[a]
                            self.fn[key_f[a], key_s[a]] = nf
                            key_f[a] = -1
                            break
                    if not same:
                        key_f[n_keys] = nf
                        key_s[n_keys] = j
                        n_keys += 1
            for a in range(n_keys):
                if key_f[a] >= 0:
                    raise RuntimeError("unmatched ridges while inserting a point")

            n_pool = 0
            for a in range(n_vis):
                f = visible_list[a]
                self.alive[f] = 0
                q = self.head[f]
                while q >= 0:
                    nq = self.nxt[q]
                    if q != p:
                        pool[n_pool] = q
                        n_pool += 1
                        self.owner[q] = -1
                    q = nq
                self.head[f] = -1
            self.owner[p] = -2
            for a in range(n_pool):
                q = pool[a]
                for t in range(n_hz):
                    if self.visible(new_list[t], q):
                        self.push(new_list[t], q)
                        break

        keep = np.flatnonzero(np.asarray(self.alive[:self.nf]))
        remap = np.full(self.nf, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        facets = np.asarray(self.fv[:self.nf])[keep].copy()
        neighbors = remap[np.asarray(self.fn[:self.nf])[keep]]
        return facets, neighbors


cdef void _sort_small(idx_t* a, int n) noexcept nogil:
    cdef int i, j
    cdef idx_t t
    for i in range(1, n):
        t = a[i]
        j = i - 1
        while j >= 0 and a[j] > t:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = t


def incremental_hull(points, order, simplex, orienter):
    P = np.ascontiguousarray(points, dtype=np.float64)
    h = _Hull(P, orienter)
    return h.run(np.ascontiguousarray(order, dtype=np.int64), [int(s) for s in simplex])
