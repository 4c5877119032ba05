"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from dirwalk.kernels import backends
from dirwalk.primes import base_primes


def best_of(fn, repeat):
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    return min(ts)


def cases():
    lo, hi = 10 ** 9, 10 ** 9 + (1 << 22)
    base = base_primes(math.isqrt(hi) + 1)
    rng = np.random.default_rng(1)
    codes = rng.integers(-1, 6, 1 << 22).astype(np.int16)
    starts = np.arange(0, len(codes) - 1000, 1010, dtype=np.int64)
    res = rng.integers(0, 7, 1 << 22).astype(np.int16)
    x = rng.standard_normal(1 << 20)
    return [
        ("sieve_segment", "candidates", hi - lo, lambda k: k.sieve_segment(lo, hi, base)),
        ("block_counts", "codes", len(starts) * 1000, lambda k: k.block_counts(codes, starts, starts + 1000, 6)),
        ("pair_counts", "pairs", len(res) - 1, lambda k: k.pair_counts(res, 1, 7, len(res) - 1)),
        ("neumaier_cumsum", "terms", len(x), lambda k: k.neumaier_cumsum(x)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    avail = backends()
    print(f"{'kernel':<16} {'backend':<8} {'seconds':>10} {'items/s':>12}")
    for name, unit, n, fn in cases():
        times = {}
        for bname, mod in avail.items():
            times[bname] = best_of(lambda: fn(mod), args.repeat)
            print(f"{name:<16} {bname:<8} {times[bname]:>10.4f} {n / times[bname]:>12.3g}  {unit}")
        if "cython" in times:
            print(f"{'':<16} speedup  {times['numpy'] / times['cython']:>10.1f}x")


if __name__ == "__main__":
    main()
