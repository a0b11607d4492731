"""Compare the numba-compiled kernels against the pure-numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. The jit path must be
enabled (do not set COACHLOOP_DISABLE_JIT) or only the numpy column is
reported.
"""

import time

import numpy as np

from coachloop import kernels


def bench(fn, *args, repeats=200):
    fn(*args)  # warm up (triggers jit compilation)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main():
    rng = np.random.default_rng(0)
    print(f"jit enabled: {kernels.JIT_ENABLED}")
    header = f"{'kernel':<18} {'n':>6} {'numpy (us)':>12} {'jit (us)':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in (50, 500, 5000):
        points = rng.normal(size=(n, 6))
        centers = rng.normal(size=(3, 6))
        labels, _ = kernels.assign_labels_numpy(points, centers)
        cases = [
            ("assign_labels", kernels.assign_labels_numpy, kernels.assign_labels_jit,
             (points, centers)),
            ("update_centroids", kernels.update_centroids_numpy, kernels.update_centroids_jit,
             (points, labels, 3)),
            ("pairwise_sq_dists", kernels.pairwise_sq_dists_numpy, kernels.pairwise_sq_dists_jit,
             (points, centers)),
        ]
        for name, numpy_fn, jit_fn, args in cases:
            t_numpy = bench(numpy_fn, *args)
            if jit_fn is not None:
                t_jit = bench(jit_fn, *args)
                print(
                    f"{name:<18} {n:>6} {t_numpy * 1e6:>12.1f} {t_jit * 1e6:>12.1f} "
                    f"{t_numpy / t_jit:>7.1f}x"
                )
            else:
                print(f"{name:<18} {n:>6} {t_numpy * 1e6:>12.1f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
