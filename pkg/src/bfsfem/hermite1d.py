"""Cubic Hermite basis on the unit interval and on an actual interval [a, b].

The four reference functions are

    H1(t) = 2t^3 - 3t^2 + 1        value at t = 0
    H2(t) = -2t^3 + 3t^2           value at t = 1
    H3(t) = t^3 - 2t^2 + t         slope at t = 0
    H4(t) = t^3 - t^2              slope at t = 1

Values are returned as arrays whose leading axis (length 4) runs over
H1..H4; trailing axes follow the shape of the input coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HERMITE_COEFFS",
    "IntervalMap",
    "eval_ref",
    "eval_actual",
    "check_reference_range",
]

# Monomial coefficients, lowest degree first. Row r is H_{r+1}.
HERMITE_COEFFS = np.array(
    [
        [1.0, 0.0, -3.0, 2.0],
        [0.0, 0.0, 3.0, -2.0],
        [0.0, 1.0, -2.0, 1.0],
        [0.0, 0.0, -1.0, 1.0],
    ]
)


def _derivative_coeffs(order: int) -> np.ndarray:
    coeffs = HERMITE_COEFFS
    for _ in range(order):
        coeffs = coeffs[:, 1:] * np.arange(1, coeffs.shape[1])
    return coeffs


_COEFFS_BY_ORDER = tuple(_derivative_coeffs(k) for k in range(3))


def _check_order(order) -> int:
    if order not in (0, 1, 2) or isinstance(order, bool):
        raise ValueError(f"derivative order must be 0, 1 or 2, got {order!r}")
    return int(order)


def eval_ref(xhat, order: int = 0) -> np.ndarray:
    """Evaluate H1..H4 (or their derivatives) at reference coordinates.

    Parameters
    ----------
    xhat : float or array_like
        Coordinates in [0, 1]. Not clamped; see :func:`check_reference_range`.
    order : {0, 1, 2}
        Derivative order.

    Returns
    -------
    ndarray of shape ``(4,) + np.shape(xhat)``
    """
    coeffs = _COEFFS_BY_ORDER[_check_order(order)]
    t = np.asarray(xhat, dtype=float)
    # Horner over the expanded monomial coefficients
    out = np.multiply.outer(coeffs[:, -1], np.ones_like(t))
    for c in coeffs[:, -2::-1].T:
        out = out * t + np.multiply.outer(c, np.ones_like(t))
    return out


def check_reference_range(xhat, tol: float = 0.0) -> None:
    """Raise ``ValueError`` if any coordinate lies outside [0, 1] (or is not finite)."""
    t = np.asarray(xhat, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("reference coordinates must be finite")
    if t.size and (t.min() < -tol or t.max() > 1.0 + tol):
        raise ValueError(
            f"reference coordinates must lie in [0, 1], got range [{t.min()}, {t.max()}]"
        )


@dataclass(frozen=True)
class IntervalMap:
    """Affine map from [a, b] onto the reference interval."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise ValueError(f"degenerate interval [{self.a}, {self.b}]")

    @property
    def h(self) -> float:
        return self.b - self.a

    def to_reference(self, x):
        return (np.asarray(x, dtype=float) - self.a) / self.h


def eval_actual(x, interval: IntervalMap, order: int = 0) -> np.ndarray:
    """Hermite basis on an actual interval, differentiated ``order`` times in x.

    H1 and H2 pick up ``h**-order`` from the chain rule; H3 and H4 are
    additionally multiplied by h so their endpoint slopes are 1.
    """
    order = _check_order(order)
    h = interval.h
    ref = eval_ref(interval.to_reference(x), order)
    scale = np.array([h**-order, h**-order, h ** (1 - order), h ** (1 - order)])
    return ref * scale.reshape((4,) + (1,) * (ref.ndim - 1))
