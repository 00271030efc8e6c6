"""Compare the numba and pure-numpy GF(2) kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]

The numpy timings use the same code path as ARTIFACT_PURE_NUMPY=1. A child
process run with that variable set confirms the fallback gives identical
answers when numba is never imported.
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from artifact import _kernels as K

SIZES = (64, 256, 1024)


def _inputs(n, seed=0):
    rng = np.random.default_rng(seed + n)
    a = (rng.random((n, n)) < 0.5).astype(np.uint8)
    b = (rng.random((n, n)) < 0.5).astype(np.uint8)
    sparse = [(int(r), int(c)) for r, c in zip(*np.nonzero(rng.random((n, n)) < 4.0 / n))]
    return a, b, sparse


def _cases(n):
    a, b, sparse = _inputs(n)
    return {
        "gf2_rank": lambda be: K.gf2_rank(a, backend=be),
        "gf2_rank_sparse": lambda be: K.gf2_rank_sparse(n, n, sparse, backend=be),
        "gf2_matmul": lambda be: K.gf2_matmul(a, b, backend=be),
    }


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _digest(value):
    if isinstance(value, np.ndarray):
        return int(value.sum()) + 7 * int(value[::3].sum())
    return int(value)


def answers():
    return {f"{name}/{n}": _digest(fn("numpy")) for n in SIZES for name, fn in _cases(n).items()}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--answers", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.answers:
        print(json.dumps(answers()))
        return
    print(f"numba available: {K.HAVE_NUMBA}")
    print(f"{'kernel':<18}{'n':>6}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
    for n in SIZES:
        for name, fn in _cases(n).items():
            want = _digest(fn("numpy"))
            t_np = _best(lambda: fn("numpy"), args.repeat)
            if K.HAVE_NUMBA:
                fn("numba")  # compile
                assert _digest(fn("numba")) == want, name
                t_nb = _best(lambda: fn("numba"), args.repeat)
                print(f"{name:<18}{n:>6}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")
            else:
                print(f"{name:<18}{n:>6}{t_np:>12.4f}{'-':>12}{'-':>10}")
    env = dict(os.environ, ARTIFACT_PURE_NUMPY="1")
    out = subprocess.run([sys.executable, __file__, "--answers"], env=env, capture_output=True, text=True, check=True)
    same = json.loads(out.stdout) == answers()
    print(f"ARTIFACT_PURE_NUMPY=1 subprocess agrees: {same}")


if __name__ == "__main__":
    main()
