"""Time the compiled survival kernels against the plain-numpy fallback.

Both implementations of batch_log_median are imported by name, checked for
bitwise agreement on shared data, then timed on the same arrays.  Run:

    python3 benchmarks/bench_kernels.py
    SUCCPROB_NO_NUMBA=1 python3 -c "import succprob"   # fallback selection

The workload mirrors the Monte Carlo oracle: M replicates of N exponential
subjects with light censoring, truncated at the D-th event, log(KM median)
per replicate.
"""

import argparse
import time

import numpy as np

from succprob import _kernels


def draw_batch(rng, M, N, ltfu_rate=0.05, median=12.0):
    rate = np.log(2) / median
    event_t = rng.exponential(1.0 / rate, (M, N))
    censor_t = rng.exponential((1.0 - ltfu_rate) / (ltfu_rate * rate), (M, N))
    fup = np.minimum(event_t, censor_t)
    return fup, event_t <= censor_t


def best_of(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=2000, help="replicates per batch")
    ap.add_argument("--reps", type=int, default=5, help="timing repetitions")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    print(f"batch_log_median, M={args.M} replicates, best of {args.reps}")
    print(f"{'N':>6} {'D':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for N in (60, 300, 1000):
        D = int(0.8 * N)
        fup, event = draw_batch(rng, args.M, N)

        got_nb = _kernels.batch_log_median_numba(fup, event, D)  # compile
        got_np = _kernels.batch_log_median_numpy(fup, event, D)
        if not np.array_equal(got_np, got_nb, equal_nan=True):
            raise SystemExit(f"paths disagree at N={N}")

        t_np = best_of(lambda: _kernels.batch_log_median_numpy(fup, event, D),
                       args.reps)
        t_nb = best_of(lambda: _kernels.batch_log_median_numba(fup, event, D),
                       args.reps)
        print(f"{N:>6} {D:>6} {t_np * 1e3:>10.1f} {t_nb * 1e3:>10.1f}"
              f" {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
