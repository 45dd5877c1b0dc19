"""Benchmark the jitted search kernel against the pure-NumPy fallback.

The randomized lower-bound search spends essentially all of its time in
margin evaluations inside the hill-climb, so this compares exactly that
workload: a full per-labelling search over a batch of restarts.

Run:  python benchmarks/bench_search.py
"""

import time

import numpy as np

from vcnn import kernels


def workload(n=8, m=4, d=2, restarts=24, seed=0):
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(n, d))
    target = rng.choice(np.array([-1, 1]), size=n).astype(np.int64)
    inits = rng.uniform(-2.0, 2.0, size=(restarts, m, d))
    init_labels = rng.choice(np.array([-1, 1]), size=(restarts, m)).astype(np.int64)
    # an unreachable target keeps every restart running its full budget
    return points, target, inits, init_labels, 120, 0.25, 0.5, 1e6, 1e-7


def time_backend(fn, args, repeats=5):
    fn(*args)  # warm-up (and jit compile)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    args = workload()
    rows = [("numpy fallback", kernels.search_labeling_numpy)]
    if kernels.search_labeling_numba is not None:
        rows.append(("numba njit", kernels.search_labeling_numba))
    else:
        print("numba unavailable; benchmarking the fallback only")
    results = {}
    for name, fn in rows:
        results[name] = time_backend(fn, args)
        print(f"{name:<16} {results[name] * 1e3:9.2f} ms per labelling-search")
    if len(results) == 2:
        speedup = results["numpy fallback"] / results["numba njit"]
        print(f"speedup: {speedup:.1f}x (selected backend: {kernels.BACKEND})")


if __name__ == "__main__":
    main()
