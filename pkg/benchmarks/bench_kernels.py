"""Compare the numba and numpy mod-p elimination kernels.

    python3 benchmarks/bench_kernels.py [--sizes 64 128 256 512] [--p 2] [--repeat 3]

Each kernel runs on the same random matrices; outputs are checked for equality
before timings are reported.
"""

import argparse
import time

import numpy as np

from homcert.linalg import _kernels


def best_of(fn, a, p, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(a, p)
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not _kernels.USE_NUMBA:
        print("numba unavailable or disabled; only the numpy path will run")
    rng = np.random.default_rng(args.seed)
    # warm up the JIT so compile time is not billed to the first size
    warm = rng.integers(0, args.p, size=(8, 8))
    for order in ("columns", "rows"):
        _kernels.rref_dense(warm, args.p, order=order)

    print(f"{'order':<8} {'n':>5} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8}")
    for order in ("columns", "rows"):
        for n in args.sizes:
            a = rng.integers(0, args.p, size=(n, n + n // 2))
            t_np, out_np = best_of(
                lambda m, p: _kernels.rref_dense(m, p, order=order, use_numba=False), a, args.p, args.repeat
            )
            if _kernels.USE_NUMBA:
                t_nb, out_nb = best_of(
                    lambda m, p: _kernels.rref_dense(m, p, order=order, use_numba=True), a, args.p, args.repeat
                )
                assert np.array_equal(out_np[0], out_nb[0]) and out_np[1] == out_nb[1]
                print(f"{order:<8} {n:>5} {t_np:>11.4f} {t_nb:>11.4f} {t_np / t_nb:>7.1f}x")
            else:
                print(f"{order:<8} {n:>5} {t_np:>11.4f} {'-':>11} {'-':>8}")


if __name__ == "__main__":
    main()
