"""Compare the compiled and pure-Python mod-p kernels on the lemma workloads.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from chernforge.minorlemma import _kernels_py, plucker_matrix, symbolic_det
from chernforge.minorlemma.fppoly import PRIME

try:
    from chernforge.minorlemma import _fpkernels
except ImportError:  # extension not built
    _fpkernels = None


def _flatten(P):
    supports, coeffs = P.monomial_supports()
    offsets = np.zeros(len(supports) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(s) for s in supports])
    idx = np.array([v for s in supports for v in s], dtype=np.int64)
    return offsets, idx, coeffs


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)

    P = symbolic_det(plucker_matrix(4, 6), range(6))
    offsets, idx, coeffs = _flatten(P)
    point = [int(x) for x in rng.integers(0, PRIME, P.ring.nvars, dtype=np.int64)]
    mats = [[[int(x) for x in row] for row in rng.integers(0, PRIME, (6, 10), dtype=np.int64)]
            for _ in range(200)]

    work = {
        f"eval_multilinear_derivs ({len(coeffs)} terms, degree 12)":
            lambda k: k.eval_multilinear_derivs(offsets, idx, coeffs, point),
        "rank_mod_p (200 x 6x10)": lambda k: [k.rank_mod_p(M) for M in mats],
        "det_mod_p (200 x 6x6)": lambda k: [k.det_mod_p([row[:6] for row in M]) for M in mats],
    }
    print(f"{'kernel':<52}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>9}")
    for name, fn in work.items():
        tp = _time(lambda: fn(_kernels_py), args.repeat)
        if _fpkernels is None:
            print(f"{name:<52}{tp:>12.4f}{'n/a':>14}{'':>9}")
            continue
        tc = _time(lambda: fn(_fpkernels), args.repeat)
        print(f"{name:<52}{tp:>12.4f}{tc:>14.4f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
