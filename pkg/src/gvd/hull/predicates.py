"""Orientation predicates: a floating-point filter backed by exact rational
arithmetic and simulation of simplicity.

The orientation of D+1 points in R^D is the sign of

    | x_0  1 |
    | ...    |   =  det[x_i - x_D]  (i < D)
    | x_D  1 |

Input point ``g`` with coordinate ``j`` is perturbed by ``eps ** (2 ** (g*D + j))``.
Rows passed with index -1 are never perturbed.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

# |det| below this fraction of the Hadamard bound is not trusted.
FILTER_REL = 1e-10


def det_fraction(rows) -> Fraction:
    """Determinant of a square matrix of Fractions by Gaussian elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pr = m[col]
        pv = pr[col]
        det *= pv
        for r in range(col + 1, n):
            row = m[r]
            f = row[col]
            if f:
                f = f / pv
                for c in range(col + 1, n):
                    row[c] -= f * pr[c]
    return det


def det_int(rows) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            a = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pk - a * rk[j]) // prev
        prev = pk
    return sign * m[n - 1][n - 1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def float_orientation(coords: np.ndarray) -> int:
    """Sign of det[x_i - x_D], or 0 when the float value is not trustworthy.

    `coords` has shape (D+1, D).
    """
    a = coords[:-1] - coords[-1]
    bound = float(np.prod(np.sqrt(np.einsum("ij,ij->i", a, a))))
    if bound == 0.0:
        return 0
    det = float(np.linalg.det(a))
    if abs(det) > FILTER_REL * bound:
        return 1 if det > 0 else -1
    return 0


def float_orientation_batch(diffs: np.ndarray) -> np.ndarray:
    """Signs of det(diffs[i]) for a stack of D x D difference matrices,
    0 where the filter is inconclusive."""
    det = np.linalg.det(diffs)
    bound = np.prod(np.sqrt(np.einsum("kij,kij->ki", diffs, diffs)), axis=1)
    s = np.where(det > 0, 1, -1)
    s[~(np.abs(det) > FILTER_REL * bound)] = 0
    return s


def _integer_rows(coords):
    """Homogeneous integer matrix with the same orientation sign.

    Every float is a dyadic rational; scaling all coordinate columns by the
    largest denominator keeps the sign of every determinant built from them.
    """
    ratios = [[float(c).as_integer_ratio() for c in r] for r in coords]
    L = max(d for r in ratios for _, d in r)
    return [[n * (L // d) for n, d in r] + [1] for r in ratios]


def exact_orientation(coords) -> int:
    """Unperturbed exact sign (0 for degenerate configurations)."""
    return _sign(det_int(_integer_rows(coords)))


def _terms(bits, limit, rows_used, cols_used):
    """Valid perturbation terms over bits < limit in increasing mask order.

    Yields lists of (row, col); the empty term comes first.
    """
    yield []
    for h in range(limit):
        r, j = bits[h]
        if rows_used >> r & 1 or cols_used >> j & 1:
            continue
        for low in _terms(bits, h, rows_used | 1 << r, cols_used | 1 << j):
            yield low + [(r, j)]


def sos_orientation(indices, coords) -> int:
    """Exact sign of the perturbed orientation determinant. Never 0."""
    base = _integer_rows(coords)
    s = _sign(det_int(base))
    if s:
        return s
    dim = len(base) - 1
    # bit b of a term mask stands for the b-th smallest perturbation key
    bits = [(r, j) for _, r, j in sorted(
        (int(g) * dim + j, r, j) for r, g in enumerate(indices)
        if g is not None and g >= 0 for j in range(dim))]
    unit = [[int(c == j) for c in range(dim + 1)] for j in range(dim)]
    terms = _terms(bits, len(bits), 0, 0)
    next(terms)
    for picked in terms:
        m = list(base)
        for r, j in picked:
            m[r] = unit[j]
        s = _sign(det_int(m))
        if s:
            return s
    raise AssertionError("symbolic perturbation did not resolve the sign")


class Orienter:
    """Orientation oracle over a fixed point array plus an unperturbed
    interior point. Used by both hull backends for the exact fallback."""

    def __init__(self, points: np.ndarray, interior: np.ndarray):
        self.points = np.ascontiguousarray(points, dtype=float)
        self.interior = np.asarray(interior, dtype=float)
        self.exact_calls = 0

    def _coords(self, idx):
        return [self.interior if i < 0 else self.points[i] for i in idx]

    def orient(self, idx) -> int:
        """Filtered then exact SoS orientation of the rows `idx` (-1 is the
        interior point)."""
        c = np.array(self._coords(idx))
        s = float_orientation(c)
        if s:
            return s
        self.exact_calls += 1
        return sos_orientation(list(idx), c)

    def exact(self, idx) -> int:
        self.exact_calls += 1
        return sos_orientation(list(idx), self._coords(idx))

    def coplanar_batch(self, idx: np.ndarray) -> np.ndarray:
        """Row-wise `coplanar` for an (k, D+1) index array."""
        idx = np.asarray(idx, dtype=np.int64)
        out = np.zeros(len(idx), dtype=bool)
        if not len(idx):
            return out
        ext = np.vstack([self.points, self.interior])
        c = ext[np.where(idx < 0, len(self.points), idx)]
        s = float_orientation_batch(c[:, :-1, :] - c[:, -1:, :])
        for i in np.flatnonzero(s == 0):
            out[i] = exact_orientation(c[i]) == 0
        return out

    def coplanar(self, idx) -> bool:
        """True if the unperturbed points are affinely dependent."""
        c = np.array(self._coords(idx))
        if float_orientation(c):
            return False
        return exact_orientation(c) == 0
