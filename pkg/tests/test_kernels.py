import numpy as np
import pytest

from bfsfem import kernels
from bfsfem.basis import shape_tables
from bfsfem.mesh import uniform_mesh
from bfsfem.quadrature import gauss_rule

needs_cython = pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")


@pytest.fixture
def problem(rng):
    m = uniform_mesh(0, 1, 0, 1, 7, 5)
    dofs = rng.normal(size=(m.n_nodes, 4))
    return m, dofs


def test_backend_listing():
    assert kernels.available_backends()[0] == "numpy"
    assert kernels.BACKEND in kernels.available_backends()
    with pytest.raises(ValueError):
        kernels.gather(np.zeros((4, 4)), np.zeros((1, 4), dtype=int), backend="fortran")


@needs_cython
def test_gather_backends_identical(problem):
    m, dofs = problem
    np.testing.assert_array_equal(
        kernels.gather(dofs, m.elements, "numpy"), kernels.gather(dofs, m.elements, "cython")
    )


@needs_cython
def test_evaluate_backends_agree(problem, rng):
    m, dofs = problem
    table = shape_tables(rng.random((13, 2)), m.size)[3]
    a = kernels.evaluate(dofs, m.elements, table, "numpy")
    b = kernels.evaluate(dofs, m.elements, table, "cython")
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13 * np.abs(a).max())


@needs_cython
@pytest.mark.parametrize("with_load", [False, True])
def test_element_integrals_backends_agree(problem, rng, with_load):
    m, dofs = problem
    rule = gauss_rule(9)
    tables = shape_tables(rule.points, m.size)
    f = rng.normal(size=(m.n_elements, 9)) if with_load else None
    a = kernels.element_integrals(dofs, m.elements, tables, rule.weights, f, "numpy")
    b = kernels.element_integrals(dofs, m.elements, tables, rule.weights, f, "cython")
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(a).max())
    if not with_load:
        assert np.all(a[:, 3] == 0) and np.all(b[:, 3] == 0)


def test_fvals_shape_checked(problem):
    m, dofs = problem
    rule = gauss_rule(4)
    with pytest.raises(ValueError):
        kernels.element_integrals(dofs, m.elements, shape_tables(rule.points, m.size), rule.weights, np.zeros((2, 4)))


def test_pure_python_switch(monkeypatch):
    monkeypatch.setenv("BFSFEM_PURE_PYTHON", "1")
    assert kernels._default_backend() == "numpy"
    monkeypatch.setenv("BFSFEM_NUM_THREADS", "3")
    assert kernels.num_threads() == 3
