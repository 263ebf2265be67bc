import math
from fractions import Fraction

import numpy as np
import pytest

from bfsfem.mesh import level_mesh, uniform_mesh
from bfsfem.quadrature import gauss_rule, integrate_on_mesh


def test_one_point_rule():
    r = gauss_rule(1)
    np.testing.assert_array_equal(r.points, [[0.5, 0.5]])
    np.testing.assert_array_equal(r.weights, [1.0])


def test_four_point_rule():
    r = gauss_rule(4)
    np.testing.assert_array_equal(r.weights, [0.25] * 4)
    d = 1 / (2 * math.sqrt(3))
    assert sorted(set(np.round(r.points.ravel(), 15))) == pytest.approx([0.5 - d, 0.5 + d])
    # exact for x^3 y^3: 1/16
    assert r.weights @ (r.points[:, 0] ** 3 * r.points[:, 1] ** 3) == pytest.approx(1 / 16, rel=1e-15)


def test_nine_point_rule():
    r = gauss_rule(9)
    centre = np.flatnonzero(np.all(r.points == 0.5, axis=1))
    assert len(centre) == 1
    assert r.weights[centre[0]] == pytest.approx(64 / 324, rel=1e-15)
    assert r.weights @ r.points[:, 0] ** 5 == pytest.approx(1 / 6, rel=1e-14)


@pytest.mark.parametrize("n", [0, 2, 3, 16, True])
def test_unsupported(n):
    with pytest.raises(ValueError):
        gauss_rule(n)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_exactness_degrees(n):
    r = gauss_rule(n)
    m = math.isqrt(n)
    x, y = r.points.T
    for a in range(2 * m + 1):
        for b in range(2 * m + 1):
            approx = r.weights @ (x**a * y**b)
            exact = 1 / ((a + 1) * (b + 1))
            err = abs(approx - exact) / exact
            if a <= 2 * m - 1 and b <= 2 * m - 1:
                assert err <= 1e-13, (a, b)
            elif a == 2 * m and b == 0:
                assert err > 1e-6, (a, b)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_symmetry_and_positivity(n):
    r = gauss_rule(n)
    assert np.all(r.weights > 0)
    assert r.weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.all((r.points > 0) & (r.points < 1))
    key = lambda pts, w: sorted(zip(np.round(pts[:, 0], 15), np.round(pts[:, 1], 15), np.round(w, 15)))  # noqa: E731
    base = key(r.points, r.weights)
    for transform in (lambda p: np.column_stack([1 - p[:, 0], p[:, 1]]),
                      lambda p: np.column_stack([p[:, 0], 1 - p[:, 1]]),
                      lambda p: p[:, ::-1]):
        assert key(transform(r.points), r.weights) == base


@pytest.mark.parametrize("n", [1, 4, 9])
@pytest.mark.parametrize("level", [1, 3])
def test_integrate_area(n, level):
    m = level_mesh(level)
    assert integrate_on_mesh(m, gauss_rule(n), lambda e, p: np.ones(len(e))) == 4.0


def _x2y2(mesh):
    def integrand(e, p):
        xy = mesh.origins[e] + p * [mesh.hx, mesh.hy]
        return xy[:, 0] ** 2 * xy[:, 1] ** 2
    return integrand


def test_integrate_x2y2_exact_with_nine_points():
    m = level_mesh(3)
    assert integrate_on_mesh(m, gauss_rule(9), _x2y2(m)) == pytest.approx(4 / 9, abs=1e-12)


def test_integrate_x2y2_one_point_level_one():
    # midpoints (+-0.5, +-0.5): 4 * 1 * 0.0625
    m = level_mesh(1)
    assert integrate_on_mesh(m, gauss_rule(1), _x2y2(m)) == 0.25


def test_integrate_non_finite():
    m = uniform_mesh(0, 1, 0, 1, 2, 2)
    with pytest.raises(FloatingPointError, match="element 3"):
        integrate_on_mesh(m, gauss_rule(4), lambda e, p: np.where(e == 3, np.nan, 1.0))


def test_closed_form_points_match_numpy_leggauss():
    # independent route: numpy's Gauss-Legendre nodes mapped to [0, 1]
    for m in (1, 2, 3):
        x, w = np.polynomial.legendre.leggauss(m)
        r = gauss_rule(m * m)
        np.testing.assert_allclose(np.unique(r.points[:, 0]), (x + 1) / 2, atol=1e-15)
        np.testing.assert_allclose(np.unique(np.round(np.outer(w / 2, w / 2).ravel(), 15)),
                                   np.unique(np.round(r.weights, 15)), atol=1e-15)
    assert Fraction(64, 324) == Fraction(8, 18) ** 2
