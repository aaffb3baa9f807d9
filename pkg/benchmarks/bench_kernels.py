"""Time the compiled kernels against their pure-numpy twins.

Run from the repo root:

    python3 benchmarks/bench_kernels.py [--repeats 5]

Each kernel is timed on a realistic workload (framed audio for the FFT
and autocorrelation, a standardized feature matrix for the SVM loop).
The first compiled call is excluded so JIT compilation does not count.
When numba is unavailable the script still runs and says so.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cognopipe import kernels


def _best_of(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_fft(repeats: int):
    rng = np.random.default_rng(0)
    frames = rng.standard_normal((4000, 512))  # ~100 s of 25 ms frames
    rev = kernels.bit_reverse_indices(512)
    return "rfft_pow2_batch (4000x512)", (
        _best_of(kernels._rfft_pow2_batch_np, (frames, rev), repeats),
        _best_of(kernels._rfft_pow2_batch_nb, (frames, rev), repeats)
        if kernels.HAS_NUMBA
        else None,
    )


def bench_autocorr(repeats: int):
    rng = np.random.default_rng(1)
    frames = rng.standard_normal((4000, 400))
    args = (frames, 32, 320)
    return "autocorr_norm_batch (4000x400, lags 32..320)", (
        _best_of(kernels._autocorr_norm_batch_np, args, repeats),
        _best_of(kernels._autocorr_norm_batch_nb, args, repeats)
        if kernels.HAS_NUMBA
        else None,
    )


def bench_pegasos(repeats: int):
    rng = np.random.default_rng(2)
    n, d, steps = 120, 450, 120 * 200
    X = rng.standard_normal((n, d))
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    cw = np.ones(n)
    idx = np.floor(rng.random(steps) * n).astype(np.int64)
    args = (X, y, cw, 0.5, idx)
    return "pegasos (120x450, 24000 steps)", (
        _best_of(kernels._pegasos_np, args, repeats),
        _best_of(kernels._pegasos_nb, args, repeats)
        if kernels.HAS_NUMBA
        else None,
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if kernels.HAS_NUMBA:
        # warm the JIT caches outside the timed region
        rng = np.random.default_rng(9)
        kernels._rfft_pow2_batch_nb(
            rng.standard_normal((2, 8)), kernels.bit_reverse_indices(8)
        )
        kernels._autocorr_norm_batch_nb(rng.standard_normal((2, 64)), 4, 32)
        kernels._pegasos_nb(
            rng.standard_normal((4, 3)),
            np.array([1.0, -1.0, 1.0, -1.0]),
            np.ones(4),
            0.5,
            np.zeros(8, dtype=np.int64),
        )
    else:
        print("numba unavailable; only the numpy path is timed")

    print(f"{'kernel':<46} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for bench in (bench_fft, bench_autocorr, bench_pegasos):
        name, (t_np, t_nb) = bench(args.repeats)
        if t_nb is None:
            print(f"{name:<46} {t_np * 1e3:>8.1f}ms {'-':>10} {'-':>8}")
        else:
            print(
                f"{name:<46} {t_np * 1e3:>8.1f}ms {t_nb * 1e3:>8.1f}ms "
                f"{t_np / t_nb:>7.1f}x"
            )


if __name__ == "__main__":
    main()
