"""Brute-force ground truth computed directly in R^d.

Nothing here touches Lie coordinates: sphere conditions are evaluated from
distances, and function families by direct evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dataset import (DataSet, ExteriorSphere, HalfSpace, PointInside, PointOutside,
                      PowerSphere)
from .errors import InvalidInputError
from .lie_geometry import EPS_PRED


@dataclass(frozen=True)
class GridSpec:
    resolution: int
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if int(self.resolution) < 2:
            raise InvalidInputError("grid resolution must be at least 2")
        if len(self.lo) != len(self.hi):
            raise InvalidInputError("grid bounds differ in dimension")

    @classmethod
    def square(cls, resolution, lo, hi, d=2):
        return cls(resolution, (float(lo),) * d, (float(hi),) * d)

    def points(self) -> np.ndarray:
        axes = [np.linspace(a, b, self.resolution) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _bounds(x, s):
    """(kind, r) with kind 'hi' for r <= value and 'lo' for r >= value."""
    if isinstance(s, PointOutside):
        return "hi", float(np.linalg.norm(x - s.point.coords))
    if isinstance(s, PointInside):
        return "lo", float(np.linalg.norm(x - s.point.coords))
    if isinstance(s, HalfSpace):
        return "hi", float(s.plane.normal @ x - s.plane.height)
    if isinstance(s, PowerSphere):
        # rho(S(x,r), S(q,t)) = (r^2 + t^2 - |x-q|^2)/2 <= 0
        w = float(np.sum((x - s.center.coords) ** 2)) - s.radius ** 2
        return "hi", (np.sqrt(w) if w >= 0 else -np.inf)
    if isinstance(s, ExteriorSphere):
        return "hi", float(np.linalg.norm(x - s.center.coords)) - s.radius
    raise InvalidInputError(f"not a site: {s!r}")


def radius_interval(x, ds: DataSet):
    """Admissible radii [lo, hi] at center x with each site's bound, or None."""
    x = np.asarray(getattr(x, "coords", x), dtype=float)
    bounds = [(s.id,) + _bounds(x, s) for s in ds.sites]
    lo = max([0.0] + [r for _, k, r in bounds if k == "lo"])
    hi = min([np.inf] + [r for _, k, r in bounds if k == "hi"])
    if lo > hi:
        return None, bounds
    return (lo, hi), bounds


def max_radius(x, ds: DataSet):
    """Largest admissible radius at x (inf if unbounded), None if infeasible."""
    interval, _ = radius_interval(x, ds)
    return None if interval is None else interval[1]


def label(x, ds: DataSet, eps: float = EPS_PRED) -> frozenset:
    """Sites whose condition is extremal at an end of the admissible interval."""
    interval, bounds = radius_interval(x, ds)
    if interval is None:
        return frozenset()
    lo, hi = interval
    out = set()
    for sid, kind, r in bounds:
        ref = hi if kind == "hi" else lo
        if np.isfinite(ref) and abs(r - ref) <= eps * max(1.0, abs(ref)):
            out.add(sid)
    return frozenset(out)


def margin(x, ds: DataSet) -> float:
    """Gap between the active bound and the runner-up, on either side."""
    interval, bounds = radius_interval(x, ds)
    if interval is None:
        return 0.0
    his = sorted(r for _, k, r in bounds if k == "hi")
    los = sorted((r for _, k, r in bounds if k == "lo"), reverse=True)
    gaps = [his[1] - his[0]] if len(his) > 1 else []
    if len(los) > 1:
        gaps.append(los[0] - los[1])
    return min(gaps) if gaps else np.inf


def _bounds_many(X, ds: DataSet):
    """Per-site bounds at many centers: (hi mask (m,), values (N, m))."""
    cols, hi = [], []
    for s in ds.sites:
        if isinstance(s, HalfSpace):
            cols.append(X @ s.plane.normal - s.plane.height)
            hi.append(True)
            continue
        c = s.point.coords if isinstance(s, (PointOutside, PointInside)) else s.center.coords
        dist2 = np.sum((X - c) ** 2, axis=1)
        if isinstance(s, PowerSphere):
            w = dist2 - s.radius ** 2
            cols.append(np.where(w >= 0, np.sqrt(np.maximum(w, 0.0)), -np.inf))
        elif isinstance(s, ExteriorSphere):
            cols.append(np.sqrt(dist2) - s.radius)
        else:
            cols.append(np.sqrt(dist2))
        hi.append(not isinstance(s, PointInside))
    return np.array(hi, dtype=bool), np.stack(cols, axis=1)


def label_grid(X, ds: DataSet, eps: float = EPS_PRED):
    """Vectorized label: (tight (N, m) over ds.sites, interval (N, 2), margin (N,)).

    Infeasible rows have no tight entries and a NaN interval.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    hi_mask, R = _bounds_many(X, ds)
    big = np.where(hi_mask, R, np.inf)
    small = np.where(hi_mask, -np.inf, R)
    hi = big.min(axis=1)
    lo = np.maximum(0.0, small.max(axis=1))
    ok = lo <= hi
    ref = np.where(hi_mask, hi[:, None], lo[:, None])
    with np.errstate(invalid="ignore"):
        tight = (np.abs(R - ref) <= eps * np.maximum(1.0, np.abs(ref))) & np.isfinite(ref)
    tight &= ok[:, None]
    gaps = np.full(len(X), np.inf)
    for side, vals in ((hi_mask, big), (~hi_mask, -small)):
        if side.sum() > 1:
            v = np.sort(vals[:, side], axis=1)
            with np.errstate(invalid="ignore"):
                gaps = np.fmin(gaps, v[:, 1] - v[:, 0])
    gaps = np.where(ok, gaps, 0.0)
    interval = np.where(ok[:, None], np.stack([lo, hi], axis=1), np.nan)
    return tight, interval, gaps


def evaluate(fs, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([f(x) for f in fs])


def label_md(x, fs, rel: float = 1e-9) -> frozenset:
    """Indices (1-based) attaining the minimum of the family at x."""
    v = evaluate(fs, x)
    m = v.min()
    return frozenset(int(i) + 1 for i in np.flatnonzero(v <= m + rel * max(1.0, abs(m))))


def k_smallest(x, fs, k: int) -> frozenset:
    v = evaluate(fs, x)
    return frozenset(int(i) + 1 for i in np.argsort(v, kind="stable")[:k])


def circumcircle(a, b, c):
    """Center and radius through three points in the plane, None if collinear."""
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    ba, ca = b - a, c - a
    den = 2.0 * (ba[0] * ca[1] - ba[1] * ca[0])
    if abs(den) <= 1e-14 * max(1.0, np.dot(ba, ba) * np.dot(ca, ca)):
        return None
    bb, cc = ba @ ba, ca @ ca
    center = a + np.array([ca[1] * bb - ba[1] * cc, ba[0] * cc - ca[0] * bb]) / den
    return center, float(np.linalg.norm(center - a))


def delaunay_vertices_bruteforce(points, tol: float = 1e-12):
    """(center, radius, triple) for every empty circumcircle, triples 0-based."""
    P = np.asarray(points, dtype=float)
    if len(P) > 14:
        raise InvalidInputError("brute force is limited to 14 points")
    out = []
    for i, j, k in combinations(range(len(P)), 3):
        cc = circumcircle(P[i], P[j], P[k])
        if cc is None:
            continue
        center, r = cc
        others = [m for m in range(len(P)) if m not in (i, j, k)]
        if all(np.linalg.norm(P[m] - center) >= r * (1.0 - tol) for m in others):
            out.append((center, r, (i, j, k)))
    return out
