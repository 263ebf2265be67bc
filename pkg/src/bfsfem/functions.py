"""Analytic functions used to build fields: a polynomial type and built-ins.

A polynomial file lists one term per line as ``a b c`` meaning
``c * x**a * y**b``; ``#`` starts a comment. Coefficients may be written
as integers, decimals or fractions (``1/3``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "AnalyticField",
    "Polynomial",
    "quartic",
    "quartic_polynomial",
    "x2y2",
    "load_polynomial",
    "QUARTIC_EXACT",
]

Func = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AnalyticField:
    """A function v(x, y) with optional derivatives vx, vy and vxy.

    Callables take coordinate arrays and are evaluated elementwise. Missing
    derivatives are filled by central differences at interpolation time.
    """

    v: Func
    vx: Func | None = None
    vy: Func | None = None
    vxy: Func | None = None
    name: str = "field"


@dataclass(frozen=True)
class Polynomial:
    """Sparse bivariate polynomial, ``terms[(a, b)]`` is the coefficient of x^a y^b."""

    terms: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        clean = {}
        for (a, b), c in self.terms.items():
            if int(a) != a or int(b) != b or a < 0 or b < 0:
                raise ValueError(f"exponents must be non-negative integers, got {(a, b)}")
            c = Fraction(c)
            if c:
                clean[(int(a), int(b))] = clean.get((int(a), int(b)), 0) + c
        object.__setattr__(self, "terms", {k: v for k, v in sorted(clean.items()) if v})

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for (a, b), c in self.terms.items():
            out = out + float(c) * x**a * y**b
        return out

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        terms: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return Polynomial(terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return Polynomial(terms)

    def diff(self, dx: int = 0, dy: int = 0) -> "Polynomial":
        terms = {}
        for (a, b), c in self.terms.items():
            if a < dx or b < dy:
                continue
            for i in range(dx):
                c *= a - i
            for j in range(dy):
                c *= b - j
            terms[(a - dx, b - dy)] = c
        return Polynomial(terms)

    @property
    def degrees(self) -> tuple[int, int]:
        if not self.terms:
            return (0, 0)
        return max(a for a, _ in self.terms), max(b for _, b in self.terms)

    def integrate(self, xmin, xmax, ymin, ymax) -> Fraction:
        """Exact integral over a rectangle with rational (or float-converted) bounds."""
        xmin, xmax, ymin, ymax = (Fraction(t) for t in (xmin, xmax, ymin, ymax))
        total = Fraction(0)
        for (a, b), c in self.terms.items():
            ix = (xmax ** (a + 1) - xmin ** (a + 1)) / (a + 1)
            iy = (ymax ** (b + 1) - ymin ** (b + 1)) / (b + 1)
            total += c * ix * iy
        return total

    def analytic(self, name: str = "polynomial") -> AnalyticField:
        return AnalyticField(self, self.diff(1, 0), self.diff(0, 1), self.diff(1, 1), name=name)

    def exact_integrals(self, domain, load: "Polynomial | None" = None) -> dict[str, Fraction]:
        """Exact L2, H1-semi and H2-semi squared norms and load (f, v) on a rectangle."""
        vx, vy = self.diff(1, 0), self.diff(0, 1)
        vxx, vyy, vxy = self.diff(2, 0), self.diff(0, 2), self.diff(1, 1)
        two = Polynomial({(0, 0): 2})
        out = {
            "l2_sq": (self * self).integrate(*domain),
            "h1_semi_sq": (vx * vx + vy * vy).integrate(*domain),
            "h2_semi_sq": (vxx * vxx + two * vxy * vxy + vyy * vyy).integrate(*domain),
        }
        if load is not None:
            out["load"] = (load * self).integrate(*domain)
        return out


def _one_minus_sq(var: int) -> Polynomial:
    # (1 - t^2)^2 = 1 - 2 t^2 + t^4 in x (var=0) or y (var=1)
    key = (lambda k: (k, 0)) if var == 0 else (lambda k: (0, k))
    return Polynomial({key(0): 1, key(2): -2, key(4): 1})


def quartic_polynomial() -> Polynomial:
    """(1 - x^2)^2 (1 - y^2)^2 as an exact polynomial."""
    return _one_minus_sq(0) * _one_minus_sq(1)


def quartic() -> AnalyticField:
    """v = (1 - x^2)^2 (1 - y^2)^2 with closed-form nodal derivatives."""
    return AnalyticField(
        v=lambda x, y: (1 - x**2) ** 2 * (1 - y**2) ** 2,
        vx=lambda x, y: -4 * x * (1 - x**2) * (1 - y**2) ** 2,
        vy=lambda x, y: -4 * y * (1 - x**2) ** 2 * (1 - y**2),
        vxy=lambda x, y: 16 * x * y * (1 - x**2) * (1 - y**2),
        name="quartic",
    )


def x2y2() -> Polynomial:
    return Polynomial({(2, 2): 1})


# Exact integrals of the quartic on (-1, 1)^2 with load f = x^2 y^2
QUARTIC_EXACT = {
    "l2_sq": Fraction(65536, 99225),
    "h1_semi_sq": Fraction(131072, 33075),
    "h2_semi_sq": Fraction(65536, 1225),
    "load": Fraction(256, 11025),
}


def load_polynomial(source) -> Polynomial:
    """Read a polynomial coefficient file (path or text stream)."""
    if not hasattr(source, "read"):
        with open(source, encoding="utf-8") as fh:
            return load_polynomial(fh)
    terms: dict[tuple[int, int], Fraction] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'a b coefficient', got {line!r}")
        try:
            a, b, c = int(parts[0]), int(parts[1]), Fraction(parts[2])
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
        if a < 0 or b < 0:
            raise ValueError(f"line {lineno}: exponents must be non-negative")
        terms[(a, b)] = terms.get((a, b), Fraction(0)) + c
    return Polynomial(terms)
