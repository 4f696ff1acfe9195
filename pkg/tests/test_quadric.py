import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from gvd import oracle
from gvd.dataset import assemble_system
from gvd.errors import InfeasibleSystemError
from gvd.lie_geometry import center_of, LieVector, lie_product, point_to_lie, sphere_to_lie
from gvd.quadric import BOUNDARY, compute_diagram, edge_quadric_roots, locate, locate_grid

from conftest import dataset


def test_roots_at_both_ends():
    a, b = sphere_to_lie((0, 0), 1).coords, sphere_to_lie((3, 0), 1).coords
    assert [r.t for r in edge_quadric_roots(a, b)] == [0.0, 1.0]


def test_root_on_circumsphere_edge():
    # segment through the circumsphere of the triangle along the radius axis
    a = sphere_to_lie((1, 1), 0).coords
    b = a.copy()
    b[-1] = 3.0
    a2 = a.copy()
    roots = edge_quadric_roots(a2, b)
    assert roots[0].t == 0.0
    # move sigma_1 so the segment crosses the quadric at r = sqrt(2)
    s = sphere_to_lie((1, 1), np.sqrt(2)).coords
    lo, hi = s.copy(), s.copy()
    lo[-1], hi[-1] = 0.0, 3.0
    lo[1] = 1 - lo[0]
    hi[1] = 1 - hi[0]
    (r,) = edge_quadric_roots(lo, hi)
    assert r.point[-1] == pytest.approx(np.sqrt(2), abs=1e-12)


def test_no_roots_on_negative_side():
    a = sphere_to_lie((0, 0), 1).coords.copy()
    b = sphere_to_lie((1, 0), 1).coords.copy()
    a[0] += 1; a[1] -= 1
    b[0] += 1; b[1] -= 1
    ts = np.linspace(0, 1, 50)
    assert all(lie_product(a + t * (b - a), a + t * (b - a)) < 0 for t in ts)
    assert edge_quadric_roots(a, b) == ()


def test_linear_case():
    # a segment along a null direction: lead coefficient vanishes
    a = point_to_lie((0, 0)).coords
    d = np.array([0.0, 0, 1, 0, 1])
    roots = edge_quadric_roots(a, a + d)
    assert len(roots) == 1 or all(abs(lie_product(r.point, r.point)) < 1e-12 for r in roots)


@given(arrays(float, 5, elements=st.floats(-3, 3)), arrays(float, 5, elements=st.floats(-3, 3)))
def test_roots_are_on_quadric(a, b):
    for r in edge_quadric_roots(a, b):
        assert 0 <= r.t <= 1
        assert abs(lie_product(r.point, r.point)) <= 1e-8 * max(1, np.sum(r.point ** 2))


def test_classical_triangle(triangle):
    D = compute_diagram(triangle)
    (v,) = D.vertices
    assert np.allclose(v.center, (1, 1), atol=1e-12) and v.radius == pytest.approx(np.sqrt(2))
    assert v.tight_sites == {1, 2, 3}
    assert len(D.edges) == 3
    assert all(BOUNDARY in e.endpoints and 0 in e.endpoints for e in D.edges)
    assert {frozenset(e.defining_sites) for e in D.edges} == {frozenset(s) for s in ({1, 2}, {1, 3}, {2, 3})}


def test_vertex_invariants(triangle):
    D = compute_diagram(triangle)
    rows = assemble_system(triangle, D.box)[:3]
    for v in D.vertices:
        assert abs(lie_product(v.lie_coords, v.lie_coords)) <= 1e-8
        assert all(r.evaluate(v.lie_coords) <= 1e-9 for r in rows)
        assert np.array_equal(center_of(LieVector(v.lie_coords, "sphere")).coords, v.center)


def test_two_sites_bisector():
    D = compute_diagram(dataset([(0, 0), (2, 0)]))
    assert D.vertices == ()
    (e,) = D.edges
    assert e.endpoints == (BOUNDARY, BOUNDARY)
    assert np.allclose(e.sample_polyline[:, 0], 1.0, atol=1e-9)


def test_square_medial_axis():
    ds = dataset(halfspaces=[((1, 0), 0), ((-1, 0), -1), ((0, 1), 0), ((0, -1), -1)])
    D = compute_diagram(ds)
    (v,) = D.vertices
    assert np.allclose(v.center, (0.5, 0.5)) and v.tight_sites == {1, 2, 3, 4}


def test_perturbed_square_collapses():
    for eps in (1e-2, 1e-4, 1e-6):
        ds = dataset(halfspaces=[((1, 0), 0), ((-1, 0), -1 - eps), ((0, 1), 0), ((0, -1), -1)])
        D = compute_diagram(ds)
        assert len(D.vertices) == 2
        for v in D.vertices:
            assert np.linalg.norm(v.center - (0.5, 0.5)) <= 2 * eps


def test_edge_samples_feasible(triangle):
    D = compute_diagram(triangle)
    rows = assemble_system(triangle, D.box)
    step = 2 * D.box / 256
    for e in D.edges:
        P = e.sample_polyline
        assert np.all(np.linalg.norm(np.diff(P, axis=0), axis=1) <= step + 1e-9)
        for x in P:
            r = oracle.max_radius(x, triangle)
            sigma = sphere_to_lie(x, r).coords
            assert all(q.evaluate(sigma) <= 1e-9 for q in rows)


def test_apollonius_two_roots():
    ds = dataset(exterior=[((-2, 0), 1), ((2, 0), 1), ((0, 0), 0.5)])
    D = compute_diagram(ds)
    got = sorted(tuple(np.round(v.center, 9)) for v in D.vertices if v.tight_sites == {1, 2, 3})
    assert got == [(0.0, -3.75), (0.0, 3.75)]


def test_locate(triangle):
    assert locate((1, 1), triangle) == {1, 2, 3}
    assert locate((0.1, 0.1), triangle) == {1}
    ds = dataset([(5, 5)], exterior=[((0, 0), 1)])
    assert locate((0, 0), ds) == frozenset()


def test_locate_agrees_with_oracle(rng):
    ds = dataset(rng.random((6, 2)), halfspaces=[((0, 1), -1)], exterior=[((0.5, 2), 0.3)])
    D = compute_diagram(ds)
    n = 0
    for x in oracle.GridSpec.square(60, -0.2, 1.2).points():
        interval, _ = oracle.radius_interval(x, ds)
        if interval is None or interval[1] > D.box or oracle.margin(x, ds) <= 1e-8:
            continue
        n += 1
        assert locate(x, ds) == oracle.label(x, ds)
        assert locate(x, ds, D.polytope) == oracle.label(x, ds)
    assert n > 1000


def test_infeasible_propagates():
    with pytest.raises(InfeasibleSystemError):
        compute_diagram(dataset([(0, 0), (1, 0)], inside=[(0, 0), (1, 0)]))


def test_backends_give_same_diagram(rng):
    from gvd.hull import BACKENDS
    ds = dataset(rng.random((30, 2)))
    D = [compute_diagram(ds, backend=b) for b in BACKENDS]
    for other in D[1:]:
        assert len(other.vertices) == len(D[0].vertices)
        for a, b in zip(other.vertices, D[0].vertices):
            assert np.array_equal(a.center, b.center)


def test_locate_grid_matches_locate(rng):
    ds = dataset(rng.random((5, 2)), inside=[(0.5, 0.5)], halfspaces=[((0, 1), -1)],
                 power=[((2, 2), 0.3)], exterior=[((0.5, 2), 0.3)])
    D = compute_diagram(ds)
    X = oracle.GridSpec.square(30, -0.5, 1.5).points()
    ids = [s.id for s in ds.sites]
    for poly in (None, D.polytope):
        mask = locate_grid(X, ds, poly)
        for x, row in zip(X, mask):
            assert frozenset(i for i, m in zip(ids, row) if m) == locate(x, ds, poly)
