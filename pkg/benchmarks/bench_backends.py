"""Time the numba and pure-numpy kernels on the same inputs.

    python3 benchmarks/bench_backends.py --sizes 20 100 400 --repeat 5 --csv out.csv

Both paths are called directly, so the SSCNET_DISABLE_NUMBA flag does not
matter here. Results are checked for equality before timing.
"""
import argparse
import csv
import time

import numpy as np

from sscnet import kernels
from sscnet.generate import random_forced_node


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def derived_set_case(rng, n):
    node = random_forced_node(rng, n)
    codes = np.hstack([node.A.codes, node.B.codes])
    black = np.zeros(max(codes.shape), np.bool_)
    order = np.arange(black.size, dtype=np.int64)
    return (codes, black, order), kernels.derived_set_numba, kernels.derived_set_numpy


def product_case(rng, n):
    m = rng.choice(3, size=(n, n), p=(0.7, 0.2, 0.1)).astype(np.int8)
    k = rng.choice(3, size=(n, n), p=(0.7, 0.2, 0.1)).astype(np.int8)
    return (m, k), kernels.pattern_product_numba, kernels.pattern_product_numpy


def run_scan(repeat):
    # full row rank by construction, so every grid point gets visited
    codes = np.array([[1, 2, 0], [0, 1, 2], [0, 0, 1]], np.int8)
    info = kernels.grid_table(codes, (-2, -1, 1, 2), (-1, 0, 1))
    p, q = codes.shape
    rows, cols, table, radices = info
    total = int(np.prod(radices))

    def jit():
        return kernels._scan_jit(p, q, rows, cols, table, radices, 0, total, kernels.RANK_BELOW_ROWS)

    def npy():
        return kernels._scan_numpy(codes, info, 0, total, kernels.RANK_BELOW_ROWS)

    assert jit() == npy() == -1
    return total, best_of(jit, repeat), best_of(npy, repeat)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 50, 200, 800])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv")
    args = ap.parse_args()

    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    rng = np.random.default_rng(args.seed)
    rows = []
    for name, make in (("derived_set", derived_set_case), ("pattern_product", product_case)):
        for n in args.sizes:
            inputs, fast, slow = make(rng, n)
            a, b = fast(*inputs), slow(*inputs)
            for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
                assert np.array_equal(x, y), f"{name} backends disagree at n={n}"
            fast(*inputs)  # compile outside the timed region
            t_fast = best_of(lambda: fast(*inputs), args.repeat)
            t_slow = best_of(lambda: slow(*inputs), args.repeat)
            rows.append({"kernel": name, "size": n, "numba_s": t_fast, "numpy_s": t_slow})
    total, t_fast, t_slow = run_scan(args.repeat)
    rows.append({"kernel": "scan_grid", "size": total, "numba_s": t_fast, "numpy_s": t_slow})

    print(f"{'kernel':<16} {'size':>7} {'numba ms':>10} {'numpy ms':>10} {'ratio':>7}")
    for r in rows:
        print(f"{r['kernel']:<16} {r['size']:>7} {r['numba_s'] * 1e3:>10.3f} {r['numpy_s'] * 1e3:>10.3f} "
              f"{r['numpy_s'] / r['numba_s']:>7.1f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
