"""Bogner-Fox-Schmit shape functions on an hx-by-hy rectangle.

Basis function i (1-based) is the tensor product H_j(x) H_k(y) of two
reference Hermite cubics, with (j, k) taken from :data:`INDEX_PAIRS`.
Functions 1-4 carry nodal values at N1..N4, 5-8 the x-derivatives,
9-12 the y-derivatives and 13-16 the mixed derivatives, where the
reference nodes are N1=(0,0), N2=(1,0), N3=(1,1), N4=(0,1).

Derivative-type functions are scaled by hx, hy or hx*hy so that the
coefficients are physical nodal derivatives on the actual rectangle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermite1d import eval_ref

__all__ = [
    "INDEX_PAIRS",
    "DERIV_SLOTS",
    "ElementSize",
    "index_map",
    "dof_scale",
    "dof_scales",
    "shapefun",
    "shapeder",
    "shape_tables",
]

INDEX_PAIRS = (
    (1, 1), (2, 1), (2, 2), (1, 2),
    (3, 1), (4, 1), (4, 2), (3, 2),
    (1, 3), (2, 3), (2, 4), (1, 4),
    (3, 3), (4, 3), (4, 4), (3, 4),
)

# Slot order of the last axis of shapeder
DERIV_SLOTS = ("dx", "dy", "dxx", "dyy", "dxy")

_J = np.array([j - 1 for j, _ in INDEX_PAIRS])
_K = np.array([k - 1 for _, k in INDEX_PAIRS])


@dataclass(frozen=True)
class ElementSize:
    hx: float
    hy: float

    def __post_init__(self):
        for name in ("hx", "hy"):
            h = getattr(self, name)
            if not np.isfinite(h) or h <= 0:
                raise ValueError(f"{name} must be positive and finite, got {h!r}")

    @classmethod
    def coerce(cls, size) -> "ElementSize":
        if isinstance(size, cls):
            return size
        hx, hy = size
        return cls(float(hx), float(hy))


def index_map(i: int) -> tuple[int, int]:
    """Return the 1-based Hermite factor pair (j, k) of basis function ``i``."""
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or not 1 <= i <= 16:
        raise ValueError(f"basis index must be an integer in 1..16, got {i!r}")
    return INDEX_PAIRS[i - 1]


def dof_scale(i: int, size) -> float:
    index_map(i)
    size = ElementSize.coerce(size)
    return float(dof_scales(size)[i - 1])


def dof_scales(size) -> np.ndarray:
    """Length-16 vector of DOF scale factors (1, hx, hy, hx*hy per group of four)."""
    size = ElementSize.coerce(size)
    return np.repeat([1.0, size.hx, size.hy, size.hx * size.hy], 4)


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1 and pts.size == 2:
        pts = pts.reshape(1, 2)
    if pts.size == 0:
        return pts.reshape(0, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must have shape (np, 2), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return pts


def shapefun(points, size) -> np.ndarray:
    """Values of all 16 basis functions at reference points.

    Parameters
    ----------
    points : array_like, shape (np, 2)
        Points of the unit square.
    size : ElementSize or (hx, hy)

    Returns
    -------
    ndarray, shape (16, np)
    """
    pts = _as_points(points)
    hx0 = eval_ref(pts[:, 0], 0)
    hy0 = eval_ref(pts[:, 1], 0)
    return dof_scales(size)[:, None] * hx0[_J] * hy0[_K]


def shapeder(points, size) -> np.ndarray:
    """First and second derivatives of all basis functions at reference points.

    Returns an array of shape (16, np, 5); the last axis follows
    :data:`DERIV_SLOTS` = (d/dx, d/dy, d2/dx2, d2/dy2, d2/dxdy), all with
    respect to physical coordinates.
    """
    return np.moveaxis(shape_tables(points, size)[1:], 0, -1)


def shape_tables(points, size) -> np.ndarray:
    """Stacked (6, 16, np) tables: value followed by the five derivative slots."""
    pts = _as_points(points)
    size = ElementSize.coerce(size)
    hx, hy = size.hx, size.hy
    x0, x1, x2 = (eval_ref(pts[:, 0], k)[_J] for k in range(3))
    y0, y1, y2 = (eval_ref(pts[:, 1], k)[_K] for k in range(3))
    tables = np.stack(
        [
            x0 * y0,
            x1 * y0 / hx,
            x0 * y1 / hy,
            x2 * y0 / hx**2,
            x0 * y2 / hy**2,
            x1 * y1 / (hx * hy),
        ]
    )
    return tables * dof_scales(size)[None, :, None]
