"""Compare the compiled and pure-Python elimination kernels.

    python benchmarks/bench_rref.py [--repeat N]
"""
import argparse
import os
import random
import subprocess
import sys
import time

from presheaf_cech import _elim

try:
    from presheaf_cech import _elim_fast
except ImportError:
    _elim_fast = None


def sparse_case(rng, m, n):
    # shaped like stacked coboundaries: mostly 0, entries in {-1, 1}
    return [[rng.choice((0, 0, 0, 0, 1, -1)) for _ in range(n)] for _ in range(m)]


def dense_case(rng, m, n):
    return [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]


CASES = [
    ("sparse 20x12", sparse_case, 20, 12),
    ("sparse 80x40", sparse_case, 80, 40),
    ("dense 12x12", dense_case, 12, 12),
    ("dense 30x30", dense_case, 30, 30),
]


def timeit(fn, mats, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        for rows, n in mats:
            fn(rows, n)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--count", type=int, default=50, help="matrices per case")
    ap.add_argument("--suite-seeds", type=int, default=30, help="seeds for the end-to-end run (0 skips it)")
    args = ap.parse_args()
    rng = random.Random(0)
    print(f"{'case':16s} {'python (s)':>11s} {'cython (s)':>11s} {'speedup':>8s}")
    for name, make, m, n in CASES:
        mats = [(make(rng, m, n), n) for _ in range(args.count)]
        if _elim_fast is not None:
            for rows, k in mats:
                assert _elim_fast.rref_int(rows, k) == _elim.rref_int(rows, k)
        py = timeit(_elim.rref_int, mats, args.repeat)
        if _elim_fast is None:
            print(f"{name:16s} {py:11.4f} {'n/a':>11s}")
            continue
        cy = timeit(_elim_fast.rref_int, mats, args.repeat)
        print(f"{name:16s} {py:11.4f} {cy:11.4f} {py / cy:7.1f}x")
    if args.suite_seeds:
        end_to_end(args.suite_seeds)


def end_to_end(seeds):
    """Wall time of every claim suite under each backend, in fresh interpreters."""
    code = ("import time; from presheaf_cech.theorems import CLAIMS, run_suite; t = time.perf_counter(); "
            f"[run_suite(c, seeds={seeds}) for c in CLAIMS]; print(time.perf_counter() - t)")
    for label, extra in (("python", {"PRESHEAF_CECH_PURE": "1"}), ("cython", {})):
        env = {k: v for k, v in os.environ.items() if k != "PRESHEAF_CECH_PURE"}
        env.update(extra)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        print(f"all claim suites, {seeds} seeds, {label:6s}: {float(out.stdout):.2f} s")


if __name__ == "__main__":
    main()
