import numpy as np
import pytest

from bfsfem.field import (
    C1Field,
    edge_midpoint_values,
    element_midpoint_values,
    eval_all_at_ref_points,
    eval_at_ref_points,
    eval_derivatives_at_ref_points,
    eval_on_edges,
    gather,
    interpolate,
    scatter,
)
from bfsfem.basis import shapefun
from bfsfem.functions import AnalyticField, Polynomial, quartic
from bfsfem.mesh import level_mesh, uniform_mesh


def test_interpolate_quartic_examples():
    m = uniform_mesh(-1, 1, -1, 1, 4, 4)
    f = interpolate(quartic(), m)
    centre = np.flatnonzero(np.all(m.nodes == 0, axis=1))[0]
    np.testing.assert_array_equal(f.dofs[centre], [1, 0, 0, 0])
    boundary = np.any(np.abs(m.nodes) == 1, axis=1)
    assert np.all(f.dofs[boundary, 0] == 0)
    half = np.flatnonzero(np.all(m.nodes == 0.5, axis=1))[0]
    assert f.dofs[half, 0] == 0.31640625


def test_interpolate_finite_difference_fill():
    m = uniform_mesh(-1, 1, -1, 1, 4, 4)
    q = quartic()
    exact = interpolate(q, m).dofs
    for partial in (AnalyticField(q.v), AnalyticField(q.v, vx=q.vx), AnalyticField(q.v, vy=q.vy)):
        approx = interpolate(partial, m).dofs
        # cross-difference roundoff is about eps / step**2
        np.testing.assert_allclose(approx, exact, atol=1e-6)


def test_interpolate_reports_bad_node():
    m = uniform_mesh(0, 1, 0, 1, 1, 1)
    f = AnalyticField(lambda x, y: np.log(x), lambda x, y: x, lambda x, y: y, lambda x, y: x)
    with np.errstate(divide="ignore"), pytest.raises(FloatingPointError, match="node 0"):
        interpolate(f, m)


def test_field_validation():
    m = uniform_mesh(0, 1, 0, 1, 1, 1)
    with pytest.raises(ValueError):
        C1Field(m, np.zeros((3, 4)))
    bad = np.zeros((4, 4))
    bad[2, 1] = np.inf
    with pytest.raises(ValueError, match="node 2"):
        C1Field(m, bad)


def test_gather_single_element_selection(backend):
    m = uniform_mesh(0, 1, 0, 1, 1, 1)
    for node in range(4):
        for comp in range(4):
            dofs = np.zeros((4, 4))
            dofs[node, comp] = 1.0
            row = gather(C1Field(m, dofs))[0]
            local = list(m.elements[0]).index(node)
            assert np.count_nonzero(row) == 1
            assert row[4 * comp + local] == 1.0


def test_gather_shared_node(backend):
    m = level_mesh(1)
    dofs = np.arange(36.0).reshape(9, 4) + 1
    coeffs = gather(C1Field(m, dofs))
    centre = 4  # (0, 0)
    for e in range(4):
        assert set(dofs[centre]) <= set(coeffs[e])


def test_scatter_gather_round_trip(rng, backend):
    m = uniform_mesh(0, 3, 0, 2, 3, 2)
    f = C1Field(m, rng.normal(size=(m.n_nodes, 4)))
    np.testing.assert_array_equal(scatter(m, gather(f)).dofs, f.dofs)


def test_constant_field(backend, rng):
    m = uniform_mesh(-1, 1, 0, 3, 3, 4)
    f = C1Field.constant(m, 1.0)
    pts = rng.random((6, 2))
    np.testing.assert_allclose(eval_at_ref_points(f, pts), 1.0, rtol=1e-14)
    for d in eval_derivatives_at_ref_points(f, pts):
        np.testing.assert_allclose(d, 0.0, atol=1e-13)
    np.testing.assert_allclose(eval_on_edges(f, [0, 0.3, 1]), 1.0, rtol=1e-14)


def test_bicubic_x3y3_single_element(backend, rng):
    m = uniform_mesh(0, 1, 0, 1, 1, 1)
    p = Polynomial({(3, 3): 1})
    f = interpolate(p.analytic(), m)
    pts = rng.random((20, 2))
    x, y = pts.T
    np.testing.assert_allclose(eval_at_ref_points(f, pts)[0], x**3 * y**3, rtol=1e-13, atol=1e-15)
    d = eval_derivatives_at_ref_points(f, pts)
    np.testing.assert_allclose(d.dx[0], 3 * x**2 * y**3, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(d.dxy[0], 9 * x**2 * y**2, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(d.dyy[0], 6 * x**3 * y, rtol=1e-12, atol=1e-14)


def test_batch_equals_pointwise(backend, rng):
    m = uniform_mesh(-1, 1, -1, 1, 3, 3)
    f = C1Field(m, rng.normal(size=(m.n_nodes, 4)))
    pts = rng.random((11, 2))
    batch = eval_at_ref_points(f, pts)
    coeffs = gather(f)
    loop = np.column_stack([coeffs @ shapefun(p, m.size)[:, 0] for p in pts])
    np.testing.assert_allclose(batch, loop, rtol=1e-13, atol=1e-13)


def test_interpolation_projection(backend, rng):
    # a C1 field treated as an analytic function interpolates back to itself
    m = uniform_mesh(0, 2, 0, 1, 4, 2)
    f = C1Field(m, rng.normal(size=(m.n_nodes, 4)))
    x0, y0 = m.nodes.min(axis=0)

    def sample(slot):
        def fn(x, y):
            e = np.minimum(((x - x0) / m.hx).astype(int), 3) + 4 * np.minimum(((y - y0) / m.hy).astype(int), 1)
            ref = np.column_stack([(x - m.origins[e, 0]) / m.hx, (y - m.origins[e, 1]) / m.hy])
            out = np.empty(len(x))
            for k in range(len(x)):
                single = C1Field(m, f.dofs)
                out[k] = eval_all_at_ref_points(single, ref[k])[slot, e[k], 0]
            return out
        return fn

    g = interpolate(AnalyticField(sample(0), sample(1), sample(2), sample(5)), m)
    np.testing.assert_allclose(g.dofs, f.dofs, rtol=1e-12, atol=1e-12)


def test_edges_agree_between_elements(backend, rng):
    m = uniform_mesh(0, 1, 0, 2, 2, 2)
    f = C1Field(m, rng.normal(size=(m.n_nodes, 4)))
    t = np.linspace(0, 1, 9)
    a = eval_on_edges(f, t, "first", derivatives=True)
    b = eval_on_edges(f, t, "second", derivatives=True)
    interior = m.edges.interior
    # v, vx, vy continuous along the edge
    np.testing.assert_allclose(a[:3, interior], b[:3, interior], rtol=1e-10, atol=1e-12)
    # mixed derivative agrees at the shared nodes
    np.testing.assert_allclose(a[5, interior][:, [0, -1]], b[5, interior][:, [0, -1]], rtol=1e-10, atol=1e-12)


def test_edge_points_lie_on_edges(backend, rng):
    # a linear field reveals the physical location of every edge sample
    m = uniform_mesh(-1, 2, 0, 1, 3, 2)
    f = interpolate(Polynomial({(1, 0): 1}).analytic(), m)
    g = interpolate(Polynomial({(0, 1): 1}).analytic(), m)
    t = np.array([0.0, 0.25, 1.0])
    a, b = m.nodes[m.edges.nodes[:, 0]], m.nodes[m.edges.nodes[:, 1]]
    expected = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    for which in ("first", "second", "left", "right"):
        np.testing.assert_allclose(eval_on_edges(f, t, which), expected[..., 0], atol=1e-14)
        np.testing.assert_allclose(eval_on_edges(g, t, which), expected[..., 1], atol=1e-14)
    with pytest.raises(ValueError):
        eval_on_edges(f, t, "middle")


def test_second_derivatives_may_jump():
    # the quartic's Hermite error has equal second derivatives at both element
    # ends on uniform meshes, so use a non-polynomial function here
    m = level_mesh(2)
    f = interpolate(AnalyticField(lambda x, y: np.sin(3 * x) * np.cos(2 * y)), m)
    a = eval_on_edges(f, [0.5], "first", derivatives=True)[:, :, 0]
    b = eval_on_edges(f, [0.5], "second", derivatives=True)[:, :, 0]
    interior = m.edges.interior
    assert np.abs(a[3] - b[3])[interior & m.edges.vertical].max() > 1e-3
    assert np.abs(a[4] - b[4])[interior & ~m.edges.vertical].max() > 1e-3
    np.testing.assert_allclose(a[:3, interior], b[:3, interior], atol=1e-12)


def test_midpoint_patterns():
    # element and edge midpoint values: largest in the middle, small near the boundary
    m = level_mesh(4)
    f = interpolate(quartic(), m)
    mids = m.map_points([[0.5, 0.5]])[:, 0]
    ev = element_midpoint_values(f)
    assert ev.shape == (256,)
    centre = np.all(np.abs(mids) < 0.1, axis=1)
    assert ev[centre].min() == ev.max()
    assert ev.max() == pytest.approx((1 - 0.0625**2) ** 4, rel=1e-4)
    near_boundary = np.any(np.abs(mids) > 0.9, axis=1)
    assert ev[near_boundary].max() < 0.06
    edge_mid = m.nodes[m.edges.nodes].mean(axis=1)
    xv = edge_midpoint_values(f)
    np.testing.assert_allclose(xv, (1 - edge_mid[:, 0] ** 2) ** 2 * (1 - edge_mid[:, 1] ** 2) ** 2, atol=2e-5)
    assert np.all(xv[~m.edges.interior] == 0)
    assert edge_midpoint_values(f, derivatives=True).shape == (6, m.n_edges)


def test_scaled_field():
    m = level_mesh(1)
    f = interpolate(quartic(), m)
    np.testing.assert_array_equal(f.scaled(3).dofs, 3 * f.dofs)
