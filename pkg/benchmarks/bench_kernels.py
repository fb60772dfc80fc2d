"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from qdesire import _backend, _fallback, linalg


def _jacobi(fn, a):
    def run():
        m = a.copy()
        v = np.eye(a.shape[0], dtype=complex)
        fn(m, v, 1e-13 * np.abs(a).max(), 100)
    return run


def _simulate(fn, cdf, table, draws):
    return lambda: fn(cdf, table, draws)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _backend.COMPILED:
        print("compiled extension not available; only the fallback can be timed")
    rng = np.random.default_rng(0)
    rows = []
    for n in (4, 8, 16, 32):
        a = np.array(linalg.random_hermitian(n, rng))
        cases = {"fallback": _jacobi(_fallback.jacobi_sweeps, a)}
        if _backend.COMPILED:
            cases["compiled"] = _jacobi(_backend.jacobi_sweeps, a)
        rows.append((f"jacobi n={n}", {k: min(timeit.repeat(f, number=1, repeat=args.repeat))
                                       for k, f in cases.items()}))
    for outcomes, trials in ((2, 10_000), (8, 100_000), (16, 1_000_000)):
        p = rng.dirichlet(np.ones(outcomes))
        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        table = rng.normal(size=(3, outcomes))
        draws = rng.random(trials)
        cases = {"fallback": _simulate(_fallback.accumulate_payoffs, cdf, table, draws)}
        if _backend.COMPILED:
            cases["compiled"] = _simulate(_backend.accumulate_payoffs, cdf, table, draws)
        rows.append((f"simulate k={outcomes} N={trials}", {k: min(timeit.repeat(f, number=1, repeat=args.repeat))
                                                          for k, f in cases.items()}))
    print(f"{'kernel':<28}{'fallback [ms]':>15}{'compiled [ms]':>15}{'speedup':>10}")
    for name, t in rows:
        comp = t.get("compiled")
        line = f"{name:<28}{1e3 * t['fallback']:>15.3f}"
        line += f"{1e3 * comp:>15.3f}{t['fallback'] / comp:>10.1f}" if comp else f"{'-':>15}{'-':>10}"
        print(line)


if __name__ == "__main__":
    main()
