"""Compare the compiled and numpy element kernels on refined meshes.

    python benchmarks/bench_kernels.py --levels 6..10 --repeat 3
"""
import argparse
import time

import numpy as np

from bfsfem import kernels
from bfsfem.basis import shape_tables, shapefun
from bfsfem.field import interpolate
from bfsfem.functions import quartic
from bfsfem.mesh import level_mesh
from bfsfem.quadrature import gauss_rule


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--levels", default="6..10")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--rule", type=int, default=9, choices=(1, 4, 9))
    args = parser.parse_args()
    lo, _, hi = args.levels.partition("..")
    levels = range(int(lo), int(hi or lo) + 1)
    backends = kernels.available_backends()
    print(f"backends: {backends}; threads: {kernels.num_threads()}")
    header = f"{'level':>5} {'elements':>9} {'kernel':>17}" + "".join(f" {b:>10}" for b in backends)
    if len(backends) > 1:
        header += f" {'speedup':>8}"
    print(header)
    rule = gauss_rule(args.rule)
    for level in levels:
        mesh = level_mesh(level)
        field = interpolate(quartic(), mesh)
        tables = shape_tables(rule.points, mesh.size)
        fvals = np.ones((mesh.n_elements, rule.n_points))
        table = shapefun(rule.points, mesh.size)
        cases = {
            "evaluate": lambda b: kernels.evaluate(field.dofs, mesh.elements, table, backend=b),
            "element_integrals": lambda b: kernels.element_integrals(
                field.dofs, mesh.elements, tables, rule.weights, fvals, backend=b
            ),
        }
        for name, run in cases.items():
            timings, results = [], []
            for b in backends:
                t, r = best_of(lambda: run(b), args.repeat)
                timings.append(t)
                results.append(r)
            for r in results[1:]:
                np.testing.assert_allclose(r, results[0], rtol=1e-10, atol=1e-12)
            line = f"{level:>5} {mesh.n_elements:>9} {name:>17}" + "".join(f" {t:>9.4f}s" for t in timings)
            if len(timings) > 1:
                line += f" {timings[0] / timings[1]:>7.1f}x"
            print(line)


if __name__ == "__main__":
    main()
