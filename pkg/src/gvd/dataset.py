"""Sites of an extremal-sphere problem and their linear inequalities.

Every inequality is stored folded: a coefficient vector ``c`` and a constant
``k`` such that the admissible Lie coordinates satisfy ``c . sigma + k <= 0``
as a plain dot product.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError
from .lie_geometry import (EuclideanPoint, OrientedPlane, fold, mobius_project,
                           plane_to_lie, point_to_lie, sphere_to_lie)

SITE = "site"
BOX = "box"
RADIUS = "radius"


@dataclass(frozen=True, order=True)
class Tag:
    """Provenance of an inequality: a site id, the bounding box or r >= 0."""
    kind: str
    site_id: int = -1

    def __str__(self):
        if self.kind == SITE:
            return f"site{self.site_id}"
        return self.kind

    @property
    def is_site(self) -> bool:
        return self.kind == SITE


BOX_TAG = Tag(BOX)
RADIUS_TAG = Tag(RADIUS)


def _positive_radius(r) -> float:
    r = float(r)
    if not np.isfinite(r) or r <= 0.0:
        raise InvalidInputError(f"sphere radius must be positive, got {r}")
    return r


@dataclass(frozen=True)
class PointOutside:
    point: EuclideanPoint
    id: int

    @property
    def dim(self):
        return self.point.dim


@dataclass(frozen=True)
class PointInside:
    point: EuclideanPoint
    id: int

    @property
    def dim(self):
        return self.point.dim


@dataclass(frozen=True)
class HalfSpace:
    plane: OrientedPlane
    id: int

    @property
    def dim(self):
        return self.plane.dim


@dataclass(frozen=True)
class PowerSphere:
    center: EuclideanPoint
    radius: float
    id: int

    def __post_init__(self):
        object.__setattr__(self, "radius", _positive_radius(self.radius))

    @property
    def dim(self):
        return self.center.dim


@dataclass(frozen=True)
class ExteriorSphere:
    center: EuclideanPoint
    radius: float
    id: int

    def __post_init__(self):
        object.__setattr__(self, "radius", _positive_radius(self.radius))

    @property
    def dim(self):
        return self.center.dim


Site = Union[PointOutside, PointInside, HalfSpace, PowerSphere, ExteriorSphere]
SITE_TYPES = (PointOutside, PointInside, HalfSpace, PowerSphere, ExteriorSphere)


@dataclass(frozen=True)
class DataSet:
    sites: tuple
    dimension: int

    def __post_init__(self):
        sites = tuple(self.sites)
        d = int(self.dimension)
        if d < 2:
            raise InvalidInputError("dimension must be at least 2")
        if len(sites) < 2:
            raise InvalidInputError("a data set needs at least 2 sites")
        for s in sites:
            if not isinstance(s, SITE_TYPES):
                raise InvalidInputError(f"not a site: {s!r}")
            if s.dim != d:
                raise InvalidInputError(
                    f"site {s.id} has dimension {s.dim}, expected {d}")
        ids = [s.id for s in sites]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("site ids must be unique")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "dimension", d)

    def __len__(self):
        return len(self.sites)

    def by_id(self, site_id: int) -> Site:
        for s in self.sites:
            if s.id == site_id:
                return s
        raise KeyError(site_id)

    @classmethod
    def from_sites(cls, sites) -> "DataSet":
        sites = tuple(sites)
        if not sites:
            raise InvalidInputError("a data set needs at least 2 sites")
        return cls(sites, sites[0].dim)


def make_sites(points=(), inside=(), halfspaces=(), power=(), exterior=(), start=1):
    """Build a site list with consecutive ids in the order of the arguments.

    `halfspaces` holds (normal, height) pairs, `power` and `exterior` hold
    (center, radius) pairs.
    """
    out = []
    i = start
    for p in points:
        out.append(PointOutside(EuclideanPoint(p), i)); i += 1
    for p in inside:
        out.append(PointInside(EuclideanPoint(p), i)); i += 1
    for n, h in halfspaces:
        out.append(HalfSpace(OrientedPlane(n, h), i)); i += 1
    for q, t in power:
        out.append(PowerSphere(EuclideanPoint(q), t, i)); i += 1
    for q, t in exterior:
        out.append(ExteriorSphere(EuclideanPoint(q), t, i)); i += 1
    return out


@dataclass(frozen=True)
class LinearInequality:
    coeffs: np.ndarray
    tag: Tag
    constant: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if not np.any(c != 0.0):
            raise InvalidInputError("inequality coefficients are all zero")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "constant", float(self.constant))

    def evaluate(self, sigma) -> float:
        """Signed value; admissible points give <= 0."""
        return float(self.coeffs @ np.asarray(sigma, dtype=float)) + self.constant


def inequality_for_site(s: Site) -> LinearInequality:
    tag = Tag(SITE, s.id)
    if isinstance(s, PointOutside):
        c = fold(point_to_lie(s.point))
    elif isinstance(s, PointInside):
        c = -fold(point_to_lie(s.point))
    elif isinstance(s, HalfSpace):
        # <sigma, pi> = n.x - h - r, which must stay non-negative.
        c = -fold(plane_to_lie(s.plane))
    elif isinstance(s, PowerSphere):
        c = fold(mobius_project(sphere_to_lie(s.center.coords, s.radius)))
    elif isinstance(s, ExteriorSphere):
        c = fold(sphere_to_lie(s.center.coords, -s.radius))
    else:
        raise InvalidInputError(f"not a site: {s!r}")
    return LinearInequality(c, tag)


def box_inequalities(d: int, B: float) -> list:
    """-B <= sigma_{2+i} <= B, sigma_{d+3} <= B and sigma_{d+3} >= 0."""
    n = d + 3
    out = []
    for i in range(d):
        e = np.zeros(n)
        e[2 + i] = 1.0
        out.append(LinearInequality(e, BOX_TAG, -B))
        out.append(LinearInequality(-e, BOX_TAG, -B))
    e = np.zeros(n)
    e[-1] = 1.0
    out.append(LinearInequality(e, BOX_TAG, -B))
    out.append(LinearInequality(-e, RADIUS_TAG))
    return out


def assemble_system(ds: DataSet, box) -> list:
    B = float(getattr(box, "B", box))
    if not B > 0:
        raise InvalidInputError("box half-width must be positive")
    return [inequality_for_site(s) for s in ds.sites] + box_inequalities(ds.dimension, B)
