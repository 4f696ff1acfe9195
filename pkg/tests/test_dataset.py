import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from gvd.dataset import (BOX_TAG, RADIUS_TAG, DataSet, ExteriorSphere, HalfSpace,
                         PointInside, PointOutside, PowerSphere, Tag, assemble_system,
                         inequality_for_site, make_sites)
from gvd.errors import InvalidInputError
from gvd.lie_geometry import EuclideanPoint, OrientedPlane, sphere_to_lie

from conftest import dataset

coord = st.floats(-5, 5, allow_nan=False)
vec2 = arrays(float, 2, elements=coord)


def test_power_sphere_example():
    ineq = inequality_for_site(PowerSphere(EuclideanPoint((3, 1)), 5, 1))
    # the functional we compute; see test_acceptance for the printed one
    assert np.array_equal(ineq.coeffs, [7, 8, 3, 1, 0])
    assert ineq.tag == Tag("site", 1)


def test_point_outside_example():
    c = inequality_for_site(PointOutside(EuclideanPoint((0, 0)), 1)).coeffs
    assert np.array_equal(c, [-0.5, 0.5, 0, 0, 0])


def test_exterior_example():
    ineq = inequality_for_site(ExteriorSphere(EuclideanPoint((0, 0)), 1, 1))
    assert np.array_equal(ineq.coeffs, [0, 1, 0, 0, 1])
    assert ineq.evaluate(sphere_to_lie((2, 0), 1).coords) == 0


def test_assemble_counts():
    ds = dataset([(0, 0), (1, 0), (0, 1)])
    rows = assemble_system(ds, 10)
    assert len(rows) == 3 + 5 + 1
    assert [r.tag for r in rows[3:]].count(BOX_TAG) == 5
    assert rows[-1].tag == RADIUS_TAG
    assert all(r.constant == 0 for r in rows[:3])
    mixed = DataSet.from_sites(make_sites([(0, 0)], halfspaces=[((1, 0), -3)],
                                          exterior=[((2, 2), 1)]))
    tags = [r.tag for r in assemble_system(mixed, 10)[:3]]
    assert len(set(tags)) == 3


def test_dataset_invariants():
    with pytest.raises(InvalidInputError):
        DataSet((), 2)
    with pytest.raises(InvalidInputError):
        DataSet.from_sites(make_sites([(0, 0)]))
    with pytest.raises(InvalidInputError):
        DataSet((PointOutside(EuclideanPoint((0, 0)), 1),
                 PointOutside(EuclideanPoint((0, 0, 0)), 2)), 2)
    with pytest.raises(InvalidInputError):
        PowerSphere(EuclideanPoint((0, 0)), 0, 1)
    with pytest.raises(InvalidInputError):
        ExteriorSphere(EuclideanPoint((0, 0)), -1, 1)


def _geometric(site, x, r):
    """Direct test of the site condition for the sphere S(x, r)."""
    if isinstance(site, PointOutside):
        return np.linalg.norm(x - site.point.coords) >= r
    if isinstance(site, PointInside):
        return np.linalg.norm(x - site.point.coords) <= r
    if isinstance(site, HalfSpace):
        return site.plane.normal @ x - site.plane.height >= r
    if isinstance(site, PowerSphere):
        return 0.5 * (r * r + site.radius ** 2 - np.sum((x - site.center.coords) ** 2)) <= 0
    return np.linalg.norm(x - site.center.coords) >= r + site.radius


sites = st.one_of(
    vec2.map(lambda p: PointOutside(EuclideanPoint(p), 1)),
    vec2.map(lambda p: PointInside(EuclideanPoint(p), 1)),
    st.tuples(st.floats(0, 2 * np.pi), coord).map(
        lambda t: HalfSpace(OrientedPlane((np.cos(t[0]), np.sin(t[0])), t[1]), 1)),
    st.tuples(vec2, st.floats(0.1, 3)).map(lambda t: PowerSphere(EuclideanPoint(t[0]), t[1], 1)),
    st.tuples(vec2, st.floats(0.1, 3)).map(lambda t: ExteriorSphere(EuclideanPoint(t[0]), t[1], 1)),
)


@given(sites, vec2, st.floats(0, 8))
def test_sign_correctness(site, x, r):
    value = inequality_for_site(site).evaluate(sphere_to_lie(x, r).coords)
    if abs(value) <= 1e-7:
        return
    assert (value <= 0) == _geometric(site, x, r)


def test_extremality_on_tangent_configurations():
    cases = [
        (PointOutside(EuclideanPoint((3, 0)), 1), (0, 0), 3),
        (PointInside(EuclideanPoint((0, 4)), 1), (0, 0), 4),
        (HalfSpace(OrientedPlane((0, 1), -2), 1), (0, 0), 2),
        (PowerSphere(EuclideanPoint((5, 0)), 3, 1), (0, 0), 4),
        (ExteriorSphere(EuclideanPoint((5, 0)), 2, 1), (0, 0), 3),
    ]
    for site, x, r in cases:
        ineq = inequality_for_site(site)
        assert ineq.evaluate(sphere_to_lie(x, r).coords) == pytest.approx(0, abs=1e-12)
        assert ineq.evaluate(sphere_to_lie(x, r * 0.9).coords) != pytest.approx(0, abs=1e-6)
