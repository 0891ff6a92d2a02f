"""Time the pure-Python and compiled kernels on the workloads the library runs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit
from fractions import Fraction

from egsums import _kernels
from egsums.cover import FIGURE_ALL, FIGURE_INCREASING, _table
from egsums.exact import rising_product


def workloads():
    p, budget = Fraction(1, 40), Fraction(1, 10**12)
    dens = [rising_product(n, 2) for n in range(2, 4000, 4)]
    figs = []
    for spec in (FIGURE_ALL, FIGURE_INCREASING):
        _, table = _table(spec)
        lows = [lo for lo, _ in spec.ranges]
        highs = [hi for _, hi in spec.ranges]
        figs.append((lows, highs, table, spec.monotone))
    return {
        "greedy_unit_scan(stage 2)": lambda k: k.greedy_unit_scan(
            2, 4, 2, p.numerator, p.denominator, budget.numerator, budget.denominator, 10**7
        ),
        "greedy_unit_scan(stage 1)": lambda k: k.greedy_unit_scan(1, 2, 1, 7, 5, 1, 10**9, 10**7),
        "unit_fraction_sum(1000 terms)": lambda k: k.unit_fraction_sum(dens),
        "enumerate_sums(figure 1)": lambda k: k.enumerate_sums(*figs[0]),
        "enumerate_sums(figure 2)": lambda k: k.enumerate_sums(*figs[1]),
        "count_assignments(1..12 x 10, monotone)": lambda k: k.count_assignments([1] * 10, [12] * 10, True),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    impls = _kernels.backends()
    if "cython" not in impls:
        print("compiled backend not built; timing the Python kernels only")
    names = list(impls)
    print(f"{'workload':42s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in workloads().items():
        results = {}
        times = {}
        for name, impl in impls.items():
            results[name] = fn(impl)
            times[name] = min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat))
        if len(set(map(repr, results.values()))) != 1:
            raise SystemExit(f"backends disagree on {label}")
        row = f"{label:42s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / max(times['cython'], 1e-9):11.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
