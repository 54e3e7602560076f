"""Benchmark the compiled kernels against the pure-numpy fallbacks.

Two workloads exercise the hot paths: dependency clustering (Gram-Schmidt
residual tests, quadratic in feature count) and CART training (split scans
over every node/feature). Run as:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from rankmed import kernels
from rankmed.cluster import cluster_features
from rankmed.tree import DecisionTree


def clustering_workload(seed=0, n_features=400, n_instances=500, rank=120):
    rng = np.random.default_rng(seed)
    base = rng.normal(size=(rank, n_instances))
    coefs = rng.normal(size=(n_features - rank, rank))
    mat = np.vstack([base, coefs @ base])
    rng.shuffle(mat)
    return mat


def tree_workload(seed=1, n_samples=4000, n_features=30, n_classes=4):
    rng = np.random.default_rng(seed)
    data = rng.normal(size=(n_samples, n_features))
    codes = rng.integers(0, n_classes, size=n_samples)
    # plant some structure so the tree grows deep
    for l in range(n_classes):
        data[codes == l, l] += 1.5
    return data, codes, n_classes


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    mat = clustering_workload()
    data, codes, n_classes = tree_workload()
    results = {}
    backends = ["pure"]
    try:
        kernels.use_backend("compiled")
        backends.insert(0, "compiled")
    except RuntimeError:
        print("compiled kernels unavailable; benchmarking pure only")

    for backend in backends:
        kernels.use_backend(backend)
        cluster_time = best_of(lambda: cluster_features(mat))
        tree_time = best_of(
            lambda: DecisionTree(list(range(1, data.shape[1] + 1)), 14, 2, n_classes).fit(data, codes)
        )
        results[backend] = (cluster_time, tree_time)
        print(f"{backend:>9}: clustering {cluster_time * 1e3:8.1f} ms   cart fit {tree_time * 1e3:8.1f} ms")

    if len(results) == 2:
        c_ratio = results["pure"][0] / results["compiled"][0]
        t_ratio = results["pure"][1] / results["compiled"][1]
        print(f"{'speedup':>9}: clustering {c_ratio:8.1f} x    cart fit {t_ratio:8.1f} x")
    kernels.use_backend("auto")


if __name__ == "__main__":
    main()
