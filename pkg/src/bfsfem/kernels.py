"""Backend selection for the element kernels.

The compiled extension is used when it was built and importable; setting
``BFSFEM_PURE_PYTHON=1`` forces the numpy fallback. ``BFSFEM_NUM_THREADS``
sets the OpenMP thread count of the compiled kernels.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

__all__ = ["BACKEND", "available_backends", "gather", "evaluate", "element_integrals"]


def available_backends() -> list[str]:
    return ["numpy"] + (["cython"] if _ckernels is not None else [])


def _default_backend() -> str:
    if os.environ.get("BFSFEM_PURE_PYTHON", "").strip() not in ("", "0"):
        return "numpy"
    return "cython" if _ckernels is not None else "numpy"


BACKEND = _default_backend()


def num_threads() -> int:
    raw = os.environ.get("BFSFEM_NUM_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return os.cpu_count() or 1


def _prep(dofs, elements):
    return (
        np.ascontiguousarray(dofs, dtype=float),
        np.ascontiguousarray(elements, dtype=np.intp),
    )


def _resolve(backend):
    backend = backend or BACKEND
    if backend not in available_backends():
        raise ValueError(f"backend {backend!r} unavailable; choose from {available_backends()}")
    return backend


def gather(dofs, elements, backend: str | None = None) -> np.ndarray:
    """Per-element coefficient rows (ne, 16) in local DOF order."""
    dofs, elements = _prep(dofs, elements)
    if _resolve(backend) == "cython":
        return _ckernels.gather(dofs, elements)
    return _pykernels.gather(dofs, elements)


def evaluate(dofs, elements, table, backend: str | None = None) -> np.ndarray:
    """Field values (ne, np) for a (16, np) basis table."""
    dofs, elements = _prep(dofs, elements)
    table = np.ascontiguousarray(table, dtype=float)
    if _resolve(backend) == "cython":
        return _ckernels.evaluate(dofs, elements, table, num_threads())
    return _pykernels.evaluate(dofs, elements, table)


def element_integrals(dofs, elements, tables, weights, fvals=None, backend: str | None = None) -> np.ndarray:
    """Per-element quadrature sums, shape (ne, 4), without the Jacobian factor.

    Columns: v^2, vx^2 + vy^2, vxx^2 + 2 vxy^2 + vyy^2, f v.
    """
    dofs, elements = _prep(dofs, elements)
    tables = np.ascontiguousarray(tables, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    if fvals is not None:
        fvals = np.ascontiguousarray(fvals, dtype=float)
        if fvals.shape != (len(elements), len(weights)):
            raise ValueError(f"fvals must have shape {(len(elements), len(weights))}, got {fvals.shape}")
    if _resolve(backend) == "cython":
        return _ckernels.element_integrals(dofs, elements, tables, weights, fvals, num_threads())
    return _pykernels.element_integrals(dofs, elements, tables, weights, fvals)
