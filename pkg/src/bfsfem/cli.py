"""Command-line front end.

Subcommands write CSV/text data for the basis pictures (``basis``), a
sample field with derivatives and midpoint values (``field``), Gauss
points on a mesh (``ips``) and the refinement study (``integrate``).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .basis import ElementSize
from .export import (
    write_csv,
    write_edge_midpoints_csv,
    write_element_midpoints_csv,
    write_field,
    write_samples_csv,
    write_table_csv,
    write_vtk_structured,
)
from .field import interpolate
from .functions import AnalyticField, Polynomial, load_polynomial, quartic, quartic_polynomial, x2y2
from .hermite1d import IntervalMap, eval_actual, eval_ref
from .integrals import MAX_LEVEL, convergence_study
from .mesh import MeshError, level_mesh, load_mesh, refine, write_mesh
from .quadrature import gauss_rule

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    domain: tuple[float, float, float, float]
    levels: tuple[int, ...]
    rules: tuple[int, ...]
    out: Path
    function: str
    load: str

    def validate(self) -> "RunConfig":
        xmin, xmax, ymin, ymax = self.domain
        if not all(map(math.isfinite, self.domain)) or xmax <= xmin or ymax <= ymin:
            raise ConfigError(f"degenerate domain {self.domain}")
        if not self.levels or any(L < 0 or L > MAX_LEVEL for L in self.levels):
            raise ConfigError(f"levels must lie in 0..{MAX_LEVEL}")
        if not self.rules or any(r not in (1, 4, 9) for r in self.rules):
            raise ConfigError("rules must be a subset of 1,4,9")
        polynomial(self.function, "function")
        if self.load != "none":
            polynomial(self.load, "load")
        return self


def parse_levels(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return (int(text),)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid level range {text!r}; use 'a..b' or 'a'") from None


def parse_rules(text: str) -> tuple[int, ...]:
    try:
        rules = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid rule list {text!r}") from None
    if not rules or any(r not in (1, 4, 9) for r in rules):
        raise argparse.ArgumentTypeError("rules must be chosen from 1,4,9")
    return rules


def parse_indices(text: str) -> tuple[int, ...]:
    try:
        idx = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid index list {text!r}") from None
    if any(not 1 <= i <= 16 for i in idx):
        raise argparse.ArgumentTypeError("basis indices must lie in 1..16")
    return idx


def polynomial(selector: str, what: str) -> Polynomial:
    """Resolve a built-in name or ``poly:<file>`` to an exact polynomial."""
    if selector == "quartic":
        return quartic_polynomial()
    if selector == "x2y2":
        return x2y2()
    if selector.startswith("poly:"):
        path = selector[5:]
        try:
            return load_polynomial(path)
        except OSError as exc:
            raise ConfigError(f"cannot read {what} coefficients: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    raise ConfigError(f"unknown {what} {selector!r}; use quartic, x2y2 or poly:<file>")


def analytic(selector: str) -> AnalyticField:
    # the built-in quartic keeps its closed-form derivatives
    if selector == "quartic":
        return quartic()
    return polynomial(selector, "function").analytic(name=selector)


def _open(path: Path):
    return open(path, "w", encoding="utf-8", newline="\n")


def _grid(n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    X, Y = np.meshgrid(t, t)
    return np.column_stack([X.ravel(), Y.ravel()])


def _mesh(cfg: RunConfig, args):
    level = cfg.levels[-1]
    if getattr(args, "mesh", None):
        mesh = load_mesh(args.mesh)
        for _ in range(level):
            mesh = refine(mesh)
        return mesh
    return level_mesh(level, cfg.domain)


def cmd_basis(cfg: RunConfig, args) -> int:
    n = args.samples
    t = np.linspace(0.0, 1.0, n)
    with _open(cfg.out / "hermite1d_reference.csv") as fh:
        header = ("xhat", "H1", "H2", "H3", "H4", "dH1", "dH2", "dH3", "dH4")
        vals = np.vstack([eval_ref(t, 0), eval_ref(t, 1)])
        write_csv(fh, header, ((t[p], *vals[:, p]) for p in range(n)))
    a, b = args.interval
    interval = IntervalMap(a, b)
    x = np.linspace(a, b, n)
    with _open(cfg.out / "hermite1d_actual.csv") as fh:
        header = ("x", "H1", "H2", "H3", "H4", "dH1", "dH2", "dH3", "dH4")
        vals = np.vstack([eval_actual(x, interval, 0), eval_actual(x, interval, 1)])
        write_csv(fh, header, ((x[p], *vals[:, p]) for p in range(n)))
    with _open(cfg.out / "bfs_basis.csv") as fh:
        write_table_csv(fh, _grid(args.grid), ElementSize(*args.size), args.indices)
    print(f"wrote basis samples to {cfg.out}")
    return 0


def cmd_field(cfg: RunConfig, args) -> int:
    mesh = _mesh(cfg, args)
    field = interpolate(analytic(cfg.function), mesh)
    with _open(cfg.out / "mesh.txt") as fh:
        write_mesh(mesh, fh)
    with _open(cfg.out / "field.txt") as fh:
        write_field(field, fh)
    with _open(cfg.out / "samples.csv") as fh:
        write_samples_csv(fh, field, _grid(args.samples))
    with _open(cfg.out / "element_midpoints.csv") as fh:
        write_element_midpoints_csv(fh, field)
    with _open(cfg.out / "edge_midpoints.csv") as fh:
        write_edge_midpoints_csv(fh, field)
    if mesh.is_structured_grid() is not None:
        with _open(cfg.out / "field.vtk") as fh:
            write_vtk_structured(fh, field)
    print(f"{cfg.function}: {mesh.n_nodes} nodes, {mesh.n_elements} elements -> {cfg.out}")
    return 0


def cmd_ips(cfg: RunConfig, args) -> int:
    mesh = _mesh(cfg, args)
    for r in cfg.rules:
        rule = gauss_rule(r)
        with _open(cfg.out / f"rule_{r}.csv") as fh:
            write_csv(fh, ("qx", "qy", "w"), ((*p, w) for p, w in zip(rule.points, rule.weights)))
        pts = mesh.map_points(rule.points)
        with _open(cfg.out / f"gauss_points_{r}.csv") as fh:
            rows = (
                (e, q, *pts[e, q], rule.weights[q])
                for e in range(mesh.n_elements)
                for q in range(r)
            )
            write_csv(fh, ("element", "point", "x", "y", "w"), rows)
    with _open(cfg.out / "mesh.txt") as fh:
        write_mesh(mesh, fh)
    print(f"wrote Gauss points for rules {cfg.rules} on {mesh.n_elements} elements to {cfg.out}")
    return 0


def exact_values(cfg: RunConfig) -> dict[str, Fraction]:
    load = None if cfg.load == "none" else polynomial(cfg.load, "load")
    return polynomial(cfg.function, "function").exact_integrals(cfg.domain, load)


def cmd_integrate(cfg: RunConfig, args) -> int:
    exact = exact_values(cfg)
    print("exact values:")
    for name, value in exact.items():
        print(f"  {name:11s} = {value}  ~ {float(value):.15f}")
    f = None if cfg.load == "none" else polynomial(cfg.load, "load")

    def progress(row):
        errs = " ".join(
            f"{k}={v:.3e}" for k, v in row.errors.items() if v is not None
        )
        print(f"level {row.level:2d} rule {row.rule}: {errs}", flush=True)

    report = convergence_study(
        analytic(cfg.function),
        {k: float(v) for k, v in exact.items()},
        levels=cfg.levels,
        rules=cfg.rules,
        f=f,
        domain=cfg.domain,
        progress=None if args.quiet else progress,
    )
    with _open(cfg.out / "report.csv") as fh:
        report.to_csv(fh, timings=not args.no_timings)
    final = {r.rule: r for r in report.rows if r.level == cfg.levels[-1]}
    print(f"final errors at level {cfg.levels[-1]}:")
    for r, row in sorted(final.items()):
        errs = ", ".join(f"{k}={v:.3e}" for k, v in row.errors.items() if v is not None)
        print(f"  {r} point(s): {errs}")
    return 0


COMMANDS = {
    "basis": cmd_basis,
    "field": cmd_field,
    "ips": cmd_ips,
    "integrate": cmd_integrate,
}

DEFAULT_LEVELS = {"basis": "1", "field": "4", "ips": "1", "integrate": "1..8"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bfsfem", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "basis": "sample 1D Hermite and 2D BFS basis functions",
        "field": "interpolate a function and export values, derivatives and midpoints",
        "ips": "export Gauss points of the 1-, 4- and 9-point rules",
        "integrate": "norms and load functional on refined meshes",
    }
    for name, help_text in helps.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--domain", nargs=4, type=float, default=(-1.0, 1.0, -1.0, 1.0),
                       metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
        p.add_argument("--levels", type=parse_levels, default=parse_levels(DEFAULT_LEVELS[name]),
                       help="refinement levels 'a..b' (field/ips use the last one)")
        p.add_argument("--rules", type=parse_rules, default=(1, 4, 9), help="comma list from 1,4,9")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--function", default="quartic", help="quartic | x2y2 | poly:<coeff-file>")
        p.add_argument("--load", default="x2y2", help="load f: x2y2 | quartic | poly:<file> | none")
        if name == "basis":
            p.add_argument("--samples", type=int, default=101, help="1D samples on [0,1]")
            p.add_argument("--grid", type=int, default=41, help="2D samples per direction")
            p.add_argument("--indices", type=parse_indices, default=(2, 6, 8, 13))
            p.add_argument("--size", nargs=2, type=float, default=(1.0, 1.0), metavar=("HX", "HY"))
            p.add_argument("--interval", nargs=2, type=float, default=(2.0, 5.0), metavar=("A", "B"))
        if name in ("field", "ips"):
            p.add_argument("--mesh", type=Path, help="mesh file refined LEVEL times instead of --domain")
        if name == "field":
            p.add_argument("--samples", type=int, default=5, help="samples per direction per element")
        if name == "integrate":
            p.add_argument("--no-timings", action="store_true", help="write 0 in the seconds column")
            p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            domain=tuple(args.domain),
            levels=tuple(args.levels),
            rules=tuple(args.rules),
            out=args.out,
            function=args.function,
            load=args.load,
        ).validate()
        for name in ("samples", "grid"):
            if getattr(args, name, 2) < 2 and not (name == "samples" and args.command == "field"):
                raise ConfigError(f"--{name} must be at least 2")
        if args.command == "field" and args.samples < 1:
            raise ConfigError("--samples must be at least 1")
        cfg.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[cfg.command](cfg, args)
    except (ConfigError, MeshError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
