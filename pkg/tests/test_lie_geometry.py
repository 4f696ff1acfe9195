import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from gvd.errors import InvalidInputError
from gvd.lie_geometry import (IMPROPER_POINT, EuclideanPoint, LieVector, OrientedPlane,
                              OrientedSphere, center_of, flip_orientation, lie_product,
                              mobius_project, mobius_scalar_product, plane_to_lie,
                              point_to_lie, predicate, quadric_residual, radius_of,
                              sphere_to_lie)

coord = st.floats(-50, 50, allow_nan=False)
vec2 = arrays(float, 2, elements=coord)
radius = st.floats(0.0, 30.0)


def test_point_examples():
    assert np.array_equal(point_to_lie((0, 0)).coords, [0.5, 0.5, 0, 0, 0])
    assert np.array_equal(point_to_lie((3, 1)).coords, [5.5, -4.5, 3, 1, 0])
    assert point_to_lie((3, 1)).kind == "point"


def test_sphere_examples():
    assert np.array_equal(sphere_to_lie((3, 1), 5).coords, [-7, 8, 3, 1, 5])
    assert np.array_equal(sphere_to_lie((2, 0), 1).coords, [2, -1, 2, 0, 1])
    s = sphere_to_lie((0, 0), 0)
    assert s.kind == "point" and np.array_equal(s.coords, [0.5, 0.5, 0, 0, 0])
    assert np.array_equal(sphere_to_lie(OrientedSphere((3, 1), 5)).coords, [-7, 8, 3, 1, 5])


def test_plane_examples():
    assert np.array_equal(plane_to_lie((0, 1), 0).coords, [0, 0, 0, 1, 1])
    assert np.array_equal(plane_to_lie((1, 0), 2).coords, [2, -2, 1, 0, 1])
    assert np.allclose(plane_to_lie((0.6, 0.8), 1).coords, [1, -1, 0.6, 0.8, 1])
    with pytest.raises(InvalidInputError):
        OrientedPlane((1, 1), 0)


def test_products():
    s = sphere_to_lie((3, 1), 5)
    assert lie_product(s, s) == 0
    assert lie_product(point_to_lie((0, 0)), point_to_lie((2, 0))) == -2
    assert lie_product(sphere_to_lie((0, 0), 1), sphere_to_lie((3, 0), 2)) == -4
    with pytest.raises(InvalidInputError):
        lie_product([1, 2, 3, 4, 5], [1, 2, 3, 4])


def test_mobius_project():
    assert np.array_equal(mobius_project([-7, 8, 3, 1, 5]), [-7, 8, 3, 1, 0])
    p = point_to_lie((1, 2))
    assert np.array_equal(mobius_project(p), p.coords)
    x = np.array([1.0, 2, 3, 4, 5])
    assert np.array_equal(mobius_project(mobius_project(x)), mobius_project(x))


def test_center_radius():
    s = sphere_to_lie((3, 1), 5)
    assert np.array_equal(center_of(s).coords, [3, 1]) and radius_of(s) == 5
    assert radius_of(point_to_lie((4, 4))) == 0
    s = LieVector(np.array([2.0, -1, 2, 0, 1]), "sphere")
    assert np.array_equal(center_of(s).coords, [2, 0]) and radius_of(s) == 1
    with pytest.raises(InvalidInputError):
        center_of(plane_to_lie((1, 0), 0))


def test_invariants_rejected():
    with pytest.raises(InvalidInputError):
        LieVector(np.array([1.0, 1, 0, 0, 0]), "point")
    with pytest.raises(InvalidInputError):
        LieVector(IMPROPER_POINT, "point")
    with pytest.raises(InvalidInputError):
        EuclideanPoint((np.nan, 0))
    with pytest.raises(InvalidInputError):
        sphere_to_lie((0, 0), np.inf)


def test_predicates():
    S = sphere_to_lie((3, 1), 5)
    assert not predicate(point_to_lie((3, 1)), S, "incident")
    assert predicate(point_to_lie((8, 1)), S, "incident")
    assert predicate(point_to_lie((3, 1)), S, "inside")
    assert predicate(point_to_lie((9, 1)), S, "outside")
    a, b = sphere_to_lie((0, 0), 1), sphere_to_lie((2, 0), 1)
    assert predicate(a, b, "externally_tangent")
    assert not predicate(a, sphere_to_lie((3, 0), 1), "externally_tangent")
    assert predicate(a, sphere_to_lie((3, 0), 1), "exterior")
    assert predicate(S, S, "contact")
    H = plane_to_lie((1, 0), 0)
    assert predicate(point_to_lie((2, 0)), H, "in_halfspace")
    assert predicate(sphere_to_lie((2, 0), 1), H, "sphere_in_halfspace")
    assert not predicate(sphere_to_lie((2, 0), 3), H, "sphere_in_halfspace")
    with pytest.raises(InvalidInputError):
        predicate(H, S, "inside")


@given(vec2, radius)
def test_quadric_membership(q, r):
    for x in (point_to_lie(q), sphere_to_lie(q, r), sphere_to_lie(q, -r)):
        assert quadric_residual(x) <= 1e-10


@given(vec2, radius)
def test_round_trip_exact(q, r):
    s = sphere_to_lie(q, r)
    assert np.array_equal(center_of(s).coords, q) and radius_of(s) == r


@given(vec2, vec2)
def test_point_product_is_half_squared_distance(p, q):
    want = -0.5 * np.sum((p - q) ** 2)
    assert lie_product(point_to_lie(p), point_to_lie(q)) == pytest.approx(want, rel=1e-12, abs=1e-9)


@given(vec2, radius, vec2, radius)
def test_sphere_product(q1, r1, q2, r2):
    want = 0.5 * ((r1 - r2) ** 2 - np.sum((q1 - q2) ** 2))
    got = lie_product(sphere_to_lie(q1, r1), sphere_to_lie(q2, r2))
    assert got == pytest.approx(want, rel=1e-12, abs=1e-9)


@given(vec2, vec2, radius)
def test_distance_table(p, q, r):
    # power of a point and squared distance, both as Lie products
    power = np.sum((p - q) ** 2) - r * r
    assert -2 * lie_product(sphere_to_lie(q, r), point_to_lie(p)) == pytest.approx(power, rel=1e-12, abs=1e-8)
    d2 = np.sum((p - q) ** 2)
    assert -2 * lie_product(point_to_lie(p), point_to_lie(q)) == pytest.approx(d2, rel=1e-12, abs=1e-8)


@given(vec2, st.floats(0, 2 * np.pi), coord)
def test_halfspace_distance(p, ang, h):
    n = np.array([np.cos(ang), np.sin(ang)])
    if p @ n < h:
        p = p + (h - p @ n + 1.0) * n
    got = lie_product(point_to_lie(p), plane_to_lie(OrientedPlane(n, h)))
    assert got == pytest.approx(p @ n - h, rel=1e-9, abs=1e-9)


@given(vec2, radius, vec2, radius)
def test_mobius_scalar_product(q1, r1, q2, r2):
    rho = mobius_scalar_product(q1, r1, q2, r2)
    got = lie_product(mobius_project(sphere_to_lie(q1, r1)), sphere_to_lie(q2, r2))
    assert got == pytest.approx(rho, rel=1e-12, abs=1e-8)


def test_flip():
    s = sphere_to_lie((1, 2), 3)
    assert np.array_equal(flip_orientation(s).coords, sphere_to_lie((1, 2), -3).coords)
