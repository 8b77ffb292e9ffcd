"""Time the compiled kernels against the pure-Python fallback on identical inputs.

    python benchmarks/compare_backends.py [--repeats 5] [--seed 0]

Also checks that both backends return bitwise-identical arrays.
"""
import argparse
import time

import numpy as np

from antiwick import chaos as C
from antiwick._kernels import backends


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    return all(np.array_equal(x, y) for x, y in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--terms", type=int, default=24)
    args = ap.parse_args(argv)

    mods = backends()
    if "compiled" not in mods:
        print("compiled extension not built; only the python backend is available")
        return 1
    py, cc = mods["python"], mods["compiled"]
    rng = np.random.default_rng(args.seed)
    xi = rng.standard_normal((2000, 8))

    print(f"{'m':>3} {'N':>3} {'kernel':<10} {'python ms':>10} {'compiled ms':>12} {'speedup':>8} same")
    for m, N in ((2, 8), (4, 12), (8, 12), (8, 16)):
        X = C.random_chaos(rng, m, N, N // 2, terms=args.terms)
        Y = C.random_chaos(rng, m, N, N // 2, terms=args.terms)
        ia, ca = X.arrays()
        ib, cb = Y.arrays()
        table = C.linearization_table(N, 2.0)
        xs = np.ascontiguousarray(xi[:, :m])
        jobs = {
            "linearize": lambda k: k.linearized_product(ia, ca, ib, cb, N, table),
            "wick": lambda k: k.wick_product(ia, ca, ib, cb, N),
            "evaluate": lambda k: (k.evaluate(ia, ca, xs, N),),
        }
        for name, job in jobs.items():
            tp, op = best_of(lambda: job(py), args.repeats)
            tc, oc = best_of(lambda: job(cc), args.repeats)
            print(f"{m:>3} {N:>3} {name:<10} {tp * 1e3:>10.3f} {tc * 1e3:>12.3f} {tp / tc:>8.1f} {same(op, oc)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
