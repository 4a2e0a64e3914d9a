"""Benchmark the compiled projection kernels against the numpy fallback.

Times the packed-bit kNN search and the layout optimizer separately,
then a full end-to-end projection, over synthetic completeness matrices
with duplicate-heavy structure (the realistic case).

    python3 benchmarks/bench_kernels.py [--full]

--full adds the large 4567x401 case; default sizes finish in a
few seconds.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from missingpath.projection import ProjectionConfig, backend, project
from missingpath.projection import _kernels_py
from missingpath.projection._backend import active as compiled_or_active
from missingpath.projection.embed import find_ab_params
from missingpath.projection.metric import pack_rows

BACKENDS = [("active:" + backend(), compiled_or_active), ("python", _kernels_py)]


def synthetic_matrix(n_rows: int, n_paths: int, n_profiles: int, seed: int = 42):
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 2, size=(n_profiles, n_paths)).astype(np.uint8)
    rows = base[rng.integers(0, n_profiles, size=n_rows)]
    flip = rng.random(rows.shape) < 0.02
    return np.where(flip, 1 - rows, rows).astype(np.uint8)


def bench_knn(rows: np.ndarray, k: int = 15) -> list[tuple[str, float]]:
    profiles = np.unique(rows, axis=0)
    packed = pack_rows(profiles)
    out = []
    for name, kernels in BACKENDS:
        started = time.perf_counter()
        kernels.knn_packed(packed, rows.shape[1], k)
        out.append((name, time.perf_counter() - started))
    return out


def bench_layout(n_nodes: int, n_edges: int, n_epochs: int = 200) -> list[tuple[str, float]]:
    rng = np.random.default_rng(0)
    heads = rng.integers(0, n_nodes, n_edges).astype(np.int32)
    tails = rng.integers(0, n_nodes, n_edges).astype(np.int32)
    weights = rng.uniform(0.05, 1.0, n_edges)
    eps = weights.max() / weights
    a, b = find_ab_params(1.0, 0.1)
    cum = np.arange(1, n_nodes + 1, dtype=np.int64)
    out = []
    for name, kernels in BACKENDS:
        pos = np.ascontiguousarray(rng.uniform(-10, 10, (n_nodes, 2)))
        started = time.perf_counter()
        kernels.optimize_layout(pos, heads, tails, eps, n_epochs, a, b, 1.0, 1.0, 5, cum, 42)
        out.append((name, time.perf_counter() - started))
    return out


def bench_project(rows: np.ndarray) -> list[tuple[str, float]]:
    from missingpath.store import CompletenessMatrix

    matrix = CompletenessMatrix(bits=rows, n_paths=rows.shape[1])
    out = []
    for name, kernels in BACKENDS:
        started = time.perf_counter()
        project(matrix, ProjectionConfig(), kernels=kernels)
        out.append((name, time.perf_counter() - started))
    return out


def report(title: str, results: list[tuple[str, float]]) -> None:
    print(f"\n{title}")
    baseline = results[-1][1]
    for name, elapsed in results:
        speedup = baseline / elapsed if elapsed else float("inf")
        print(f"  {name:<18} {elapsed * 1000:10.1f} ms   ({speedup:5.1f}x vs python)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true", help="add the 4567x401 case")
    args = parser.parse_args()

    print(f"active backend: {backend()}")

    rows = synthetic_matrix(1500, 120, 200)
    report("knn 1500x120 (unique profiles, k=15)", bench_knn(rows))
    report("layout 1500 nodes, 20k edges, 200 epochs", bench_layout(1500, 20_000))
    report("project end-to-end 1500x120", bench_project(rows))

    if args.full:
        big = synthetic_matrix(4567, 401, 300)
        report("knn 4567x401", bench_knn(big))
        report("layout 4567 nodes, 70k edges, 200 epochs", bench_layout(4567, 70_000))
        report("project end-to-end 4567x401", bench_project(big))


if __name__ == "__main__":
    main()
