"""Bounding box, the sigma_1 + sigma_2 = 1 slice and a strictly feasible point."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..dataset import (BOX_TAG, DataSet, ExteriorSphere, HalfSpace, PointInside,
                       PointOutside, PowerSphere)
from ..errors import InfeasibleSystemError, InvalidInputError

EPS_FEAS = 1e-9


@dataclass(frozen=True)
class BoundingBox:
    B: float

    def __post_init__(self):
        B = float(self.B)
        if not (np.isfinite(B) and B > 0):
            raise InvalidInputError("bounding box half-width must be positive")
        object.__setattr__(self, "B", B)


def _site_extent(s) -> float:
    if isinstance(s, (PointOutside, PointInside)):
        return float(np.max(np.abs(s.point.coords)))
    if isinstance(s, HalfSpace):
        return abs(s.plane.height)
    if isinstance(s, (PowerSphere, ExteriorSphere)):
        return float(np.max(np.abs(s.center.coords))) + abs(s.radius)
    raise InvalidInputError(f"not a site: {s!r}")


def choose_bounding_box(ds: DataSet, margin: float = 4.0) -> BoundingBox:
    if not ds.sites:
        raise InvalidInputError("empty data set")
    extent = max(_site_extent(s) for s in ds.sites)
    return BoundingBox(max(1.0, margin * extent))


@dataclass(frozen=True)
class ReducedSystem:
    """Rows A y + b <= 0 on the slice, y = (sigma_1, sigma_3, ..., sigma_last).

    With ``has_radius`` false the last Lie coordinate is pinned to zero and
    y = (sigma_1, center).
    """
    A: np.ndarray
    b: np.ndarray
    tags: tuple
    dimension: int
    has_radius: bool = True

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.ndim != 2 or b.shape != (A.shape[0],) or len(self.tags) != A.shape[0]:
            raise InvalidInputError("malformed reduced system")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "tags", tuple(self.tags))

    @property
    def ambient_dim(self) -> int:
        return self.A.shape[1]

    def __len__(self):
        return self.A.shape[0]

    def lift(self, y) -> np.ndarray:
        """Slice coordinates back to full Lie coordinates."""
        y = np.asarray(y, dtype=float)
        head = [y[..., :1], 1.0 - y[..., :1], y[..., 1:]]
        if not self.has_radius:
            head.append(np.zeros(y.shape[:-1] + (1,)))
        return np.concatenate(head, axis=-1)

    def reduce(self, sigma) -> np.ndarray:
        sigma = np.asarray(sigma, dtype=float)
        if self.has_radius:
            return np.concatenate([sigma[..., :1], sigma[..., 2:]], axis=-1)
        return np.concatenate([sigma[..., :1], sigma[..., 2:-1]], axis=-1)

    def residuals(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ self.A.T + self.b

    def extend(self, A, b, tags) -> "ReducedSystem":
        return ReducedSystem(np.vstack([self.A, A]), np.concatenate([self.b, b]),
                             self.tags + tuple(tags), self.dimension, self.has_radius)


def sigma1_caps(d: int, B: float, has_radius: bool = True):
    """Rows bounding sigma_1 on the slice.

    On the quadric sigma_1 = (1 + |c|^2 - r^2)/2, so within the box it stays
    in [(1 - B^2)/2, (1 + d B^2)/2]; the caps sit strictly outside that range.
    """
    n = d + 2 if has_radius else d + 1
    pad = (1.0 + B * B) / 4.0
    lo = (1.0 - (B * B if has_radius else 0.0)) / 2.0 - pad
    hi = (1.0 + d * B * B) / 2.0 + pad
    A = np.zeros((2, n))
    A[0, 0] = -1.0
    A[1, 0] = 1.0
    return A, np.array([lo, -hi]), (BOX_TAG, BOX_TAG)


def normalize_slice(ineqs, box=None) -> ReducedSystem:
    """Substitute sigma_2 = 1 - sigma_1.

    With a box, two sigma_1 caps are appended so the slice polytope is bounded.
    """
    if not ineqs:
        raise InvalidInputError("empty inequality system")
    C = np.array([i.coeffs for i in ineqs], dtype=float)
    k = np.array([i.constant for i in ineqs], dtype=float)
    n = C.shape[1]
    d = n - 3
    A = np.concatenate([(C[:, 0] - C[:, 1])[:, None], C[:, 2:]], axis=1)
    b = C[:, 1] + k
    system = ReducedSystem(A, b, tuple(i.tag for i in ineqs), d, True)
    if box is not None:
        B = float(getattr(box, "B", box))
        system = system.extend(*sigma1_caps(d, B, True))
    return system


def feasible_point(system: ReducedSystem, eps: float = EPS_FEAS):
    """Point maximizing the minimum normalized slack, with that slack.

    Raises InfeasibleSystemError when the best slack is at most `eps`.
    """
    A, b = system.A, system.b
    norms = np.linalg.norm(A, axis=1)
    live = norms > 0
    if np.any(b[~live] > 0):
        raise InfeasibleSystemError("empty sphere family")
    An = A[live] / norms[live, None]
    bn = b[live] / norms[live]
    m, n = An.shape
    # variables (y, t): maximize t subject to An y + t <= -bn
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([An, np.ones((m, 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=-bn, bounds=[(None, None)] * (n + 1),
                  method="highs")
    if res.status == 3:
        # unbounded region: any point with unit slack will do
        res = linprog(cost, A_ub=A_ub, b_ub=-bn,
                      bounds=[(None, None)] * n + [(None, 1.0)], method="highs")
    if res.status == 2:
        raise InfeasibleSystemError("empty sphere family")
    if res.status != 0:
        raise InfeasibleSystemError(f"empty sphere family (LP status {res.status})")
    y = res.x[:n]
    slack = float(np.min(-(An @ y + bn)))
    if slack <= eps:
        raise InfeasibleSystemError("empty sphere family")
    return y, slack
