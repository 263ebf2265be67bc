"""Tensor-product Gauss-Legendre rules on the unit square."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import RectMesh

__all__ = ["QuadratureRule", "gauss_rule", "gauss_legendre_1d", "integrate_on_mesh", "fsum_columns"]

SUPPORTED = (1, 4, 9)


def gauss_legendre_1d(m: int) -> tuple[np.ndarray, np.ndarray]:
    """m-point Gauss-Legendre nodes and weights on [0, 1], in closed form for m <= 3."""
    if m == 1:
        return np.array([0.5]), np.array([1.0])
    if m == 2:
        d = 1.0 / (2.0 * math.sqrt(3.0))
        return np.array([0.5 - d, 0.5 + d]), np.array([0.5, 0.5])
    if m == 3:
        d = math.sqrt(15.0) / 10.0
        return np.array([0.5 - d, 0.5, 0.5 + d]), np.array([5.0, 8.0, 5.0]) / 18.0
    raise ValueError(f"only 1, 2 or 3 points per direction are supported, got {m}")


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Reference points in [0,1]^2 with weights summing to one.

    Points run x-fastest: index ``iy * m + ix``.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for name in ("points", "weights"):
            a = np.array(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def n_points(self) -> int:
        return len(self.weights)

    def __len__(self) -> int:
        return self.n_points


def gauss_rule(n_points: int) -> QuadratureRule:
    """The 1-, 4- or 9-point tensor Gauss rule."""
    if n_points not in SUPPORTED or isinstance(n_points, bool):
        raise ValueError(f"number of Gauss points must be one of {SUPPORTED}, got {n_points!r}")
    x, w = gauss_legendre_1d(math.isqrt(n_points))
    X, Y = np.meshgrid(x, x)
    return QuadratureRule(np.column_stack([X.ravel(), Y.ravel()]), np.outer(w, w).ravel())


def fsum_columns(values: np.ndarray) -> np.ndarray:
    """Correctly rounded column sums; independent of summation order."""
    values = np.asarray(values, dtype=float)
    return np.array([math.fsum(col) for col in values.reshape(len(values), -1).T])


def integrate_on_mesh(
    mesh: RectMesh,
    rule: QuadratureRule,
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> float:
    """Sum of hx*hy * sum_q w_q * integrand(elements, point_q) over all elements.

    ``integrand`` is called once per quadrature point with the array of all
    element indices and the reference point, and returns one value per
    element. Use :meth:`RectMesh.map_points` for physical coordinates.
    """
    elements = np.arange(mesh.n_elements)
    per_element = np.zeros(mesh.n_elements)
    for q, (point, w) in enumerate(zip(rule.points, rule.weights)):
        vals = np.broadcast_to(np.asarray(integrand(elements, point), dtype=float), elements.shape)
        bad = ~np.isfinite(vals)
        if bad.any():
            e = int(np.argmax(bad))
            raise FloatingPointError(
                f"non-finite integrand in element {e} at quadrature point {q} {tuple(point)}"
            )
        per_element += w * vals
    return mesh.element_area * math.fsum(per_element)
