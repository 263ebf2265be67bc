"""Squared Sobolev norms, load functionals and the refinement study."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import kernels
from .basis import shape_tables
from .field import C1Field, interpolate
from .functions import AnalyticField
from .mesh import level_mesh
from .quadrature import QuadratureRule, fsum_columns, gauss_rule

__all__ = [
    "IntegralValues",
    "ConvergenceRow",
    "ConvergenceReport",
    "norms",
    "load_functional",
    "integrals",
    "convergence_study",
    "observed_orders",
    "MAX_LEVEL",
    "REPORT_COLUMNS",
]

MAX_LEVEL = 12
NAMES = ("l2_sq", "h1_semi_sq", "h2_semi_sq", "load")
REPORT_COLUMNS = (
    "level", "rule", "nodes", "elements",
    "L2sq", "H1sq", "H2sq", "load",
    "errL2", "errH1", "errH2", "errLoad", "seconds",
)


@dataclass(frozen=True)
class IntegralValues:
    l2_sq: float
    h1_semi_sq: float
    h2_semi_sq: float
    load: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {name: getattr(self, name) for name in NAMES}


def _load_values(field: C1Field, f, rule: QuadratureRule) -> np.ndarray:
    if isinstance(f, AnalyticField):
        f = f.v
    pts = field.mesh.map_points(rule.points)
    vals = np.asarray(f(pts[..., 0], pts[..., 1]), dtype=float)
    vals = np.broadcast_to(vals, pts.shape[:2])
    bad = ~np.isfinite(vals)
    if bad.any():
        e, q = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise FloatingPointError(f"load is not finite in element {e} at {tuple(pts[e, q])}")
    return vals


def integrals(field: C1Field, rule: QuadratureRule, f=None, backend: str | None = None) -> IntegralValues:
    """All integrals in one pass over the elements.

    The squared H2 seminorm uses the full Hessian, vxx^2 + 2 vxy^2 + vyy^2.
    Element contributions are summed with ``math.fsum``, so the result
    does not depend on element order or thread count.
    """
    mesh = field.mesh
    tables = shape_tables(rule.points, mesh.size)
    fvals = None if f is None else _load_values(field, f, rule)
    per_element = kernels.element_integrals(
        field.dofs, mesh.elements, tables, rule.weights, fvals, backend=backend
    )
    l2, h1, h2, load = fsum_columns(per_element) * mesh.element_area
    bad = [name for name, x in zip(NAMES, (l2, h1, h2, load)) if not math.isfinite(x)]
    if bad:
        raise FloatingPointError(f"non-finite integral(s): {', '.join(bad)}")
    return IntegralValues(float(l2), float(h1), float(h2), None if f is None else float(load))


def norms(field: C1Field, rule: QuadratureRule, backend: str | None = None) -> IntegralValues:
    return integrals(field, rule, None, backend=backend)


def load_functional(field: C1Field, f, rule: QuadratureRule, backend: str | None = None) -> float:
    """(f, v) for an analytic f (AnalyticField or plain callable)."""
    return integrals(field, rule, f, backend=backend).load


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    rule: int
    nodes: int
    elements: int
    values: IntegralValues
    errors: Mapping[str, float | None]
    seconds: float


@dataclass
class ConvergenceReport:
    exact: Mapping[str, float | None]
    rows: list[ConvergenceRow] = dc_field(default_factory=list)

    def select(self, rule: int) -> list[ConvergenceRow]:
        return sorted((r for r in self.rows if r.rule == rule), key=lambda r: r.level)

    def errors(self, rule: int, name: str) -> np.ndarray:
        return np.array([r.errors[name] for r in self.select(rule)], dtype=float)

    def levels(self, rule: int) -> list[int]:
        return [r.level for r in self.select(rule)]

    def to_csv(self, stream, timings: bool = True) -> None:
        fmt = lambda x: "" if x is None else format(x, ".17g")  # noqa: E731
        stream.write(",".join(REPORT_COLUMNS) + "\n")
        for r in self.rows:
            vals = [r.values.as_dict()[n] for n in NAMES]
            errs = [r.errors[n] for n in NAMES]
            secs = r.seconds if timings else 0.0
            cells = [str(r.level), str(r.rule), str(r.nodes), str(r.elements)]
            cells += [fmt(x) for x in vals + errs] + [fmt(secs)]
            stream.write(",".join(cells) + "\n")


def _parse_exact(exact) -> dict[str, float | None]:
    exact = dict(exact or {})
    unknown = set(exact) - set(NAMES)
    if unknown:
        raise ValueError(f"unknown exact value keys: {sorted(unknown)}")
    out = {}
    for name in NAMES:
        x = exact.get(name)
        if x is not None:
            x = float(x)
            if not math.isfinite(x):
                raise ValueError(f"exact value {name} must be finite")
        out[name] = x
    return out


def convergence_study(
    v: AnalyticField,
    exact: Mapping[str, float] | None,
    levels: Sequence[int] = range(1, 9),
    rules: Sequence[int] = (1, 4, 9),
    f: AnalyticField | Callable | None = None,
    domain=(-1.0, 1.0, -1.0, 1.0),
    backend: str | None = None,
    progress: Callable[[ConvergenceRow], None] | None = None,
) -> ConvergenceReport:
    """Integrate the interpolant of ``v`` on uniformly refined meshes.

    Level L has 2**L elements per direction. Errors are absolute
    differences to ``exact`` (keys as in :class:`IntegralValues`); missing
    exact values give ``None`` errors.
    """
    levels = [int(L) for L in levels]
    if any(L < 0 or L > MAX_LEVEL for L in levels):
        raise ValueError(f"levels must lie in 0..{MAX_LEVEL}, got {levels}")
    quad = [gauss_rule(r) for r in rules]
    exact_vals = _parse_exact(exact)
    report = ConvergenceReport(exact_vals)
    for level in levels:
        mesh = level_mesh(level, domain)
        field = interpolate(v, mesh)
        for r, rule in zip(rules, quad):
            start = time.perf_counter()
            vals = integrals(field, rule, f, backend=backend)
            seconds = time.perf_counter() - start
            errs = {
                n: None if exact_vals[n] is None or vals.as_dict()[n] is None
                else abs(vals.as_dict()[n] - exact_vals[n])
                for n in NAMES
            }
            row = ConvergenceRow(level, r, mesh.n_nodes, mesh.n_elements, vals, errs, seconds)
            report.rows.append(row)
            if progress is not None:
                progress(row)
    return report


def observed_orders(errors: Sequence[float]) -> np.ndarray:
    """log2 of consecutive error ratios, for meshes halving h each level."""
    e = np.asarray(errors, dtype=float)
    return np.log2(e[:-1] / e[1:])
