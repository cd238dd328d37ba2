"""Compare the compiled kernels with the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from entconc import _kernels_py
from entconc.partitions import enumerate_young_indices

try:
    from entconc import _kernels
except ImportError:
    _kernels = None


def cases():
    rows3 = np.array([lam.parts for lam in enumerate_young_indices(300, 3)], dtype=np.int64)
    rows2 = np.array([lam.parts for lam in enumerate_young_indices(20000, 2)], dtype=np.int64)
    p2 = np.array([0.75, 0.25])
    p3 = np.array([0.5, 0.3, 0.2])
    return {
        "log2_dim_v_rows d=2 (10001 rows)": lambda k: k.log2_dim_v_rows(rows2),
        f"log2_dim_v_rows d=3 ({len(rows3)} rows)": lambda k: k.log2_dim_v_rows(rows3),
        "grid_min_simplex d=2 (1e6 points)": lambda k: k.grid_min_simplex(p2, 0.6, False, 0.0, 1.0, 1_000_000),
        "grid_min_simplex d=3 (1e6 cells)": lambda k: k.grid_min_simplex(p3, 1.0, False, 0.0, 1.0, 1000, 0.0, 1.0, 1000),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the NumPy fallback is available")
    print(f"{'kernel':40s} {'numpy [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for name, fn in cases().items():
        slow = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{name:40s} {slow:12.2f} {'-':>14s} {'-':>8s}")
            continue
        fast = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        a, b = fn(_kernels_py), fn(_kernels)
        agree = np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-9, atol=1e-9)
        print(f"{name:40s} {slow:12.2f} {fast:14.2f} {slow / fast:7.1f}x{'' if agree else '  MISMATCH'}")


if __name__ == "__main__":
    main()
