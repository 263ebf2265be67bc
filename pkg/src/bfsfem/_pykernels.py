"""Numpy implementations of the element kernels (fallback backend)."""
from __future__ import annotations

import numpy as np

CHUNK = 1 << 15


def gather(dofs: np.ndarray, elements: np.ndarray) -> np.ndarray:
    # (ne, node, component) -> (ne, component, node): coefficient 4*c + k
    return np.ascontiguousarray(dofs[elements].transpose(0, 2, 1)).reshape(len(elements), 16)


def evaluate(dofs: np.ndarray, elements: np.ndarray, table: np.ndarray) -> np.ndarray:
    out = np.empty((len(elements), table.shape[1]))
    for s in range(0, len(elements), CHUNK):
        out[s : s + CHUNK] = gather(dofs, elements[s : s + CHUNK]) @ table
    return out


def element_integrals(dofs, elements, tables, weights, fvals=None) -> np.ndarray:
    ne = len(elements)
    out = np.zeros((ne, 4))
    for s in range(0, ne, CHUNK):
        c = gather(dofs, elements[s : s + CHUNK])
        v, vx, vy, vxx, vyy, vxy = (c @ t for t in tables)
        out[s : s + CHUNK, 0] = (v * v) @ weights
        out[s : s + CHUNK, 1] = (vx * vx + vy * vy) @ weights
        out[s : s + CHUNK, 2] = (vxx * vxx + 2.0 * vxy * vxy + vyy * vyy) @ weights
        if fvals is not None:
            out[s : s + CHUNK, 3] = (fvals[s : s + CHUNK] * v) @ weights
    return out
