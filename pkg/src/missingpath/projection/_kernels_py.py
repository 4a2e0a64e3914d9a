"""Pure-Python (numpy/scipy) fallback for the compiled kernels.

Selected at import time when the Cython extension is unavailable. The
kNN search matches the compiled kernel bit-for-bit; the layout optimizer
applies each epoch's updates synchronously instead of edge-by-edge, so
its coordinates differ numerically from the compiled backend while
remaining deterministic for a fixed seed.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist


def backend_name() -> str:
    return "python"


def _unpack(packed: np.ndarray, n_paths: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(packed).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :n_paths].astype(bool)


def knn_packed(packed: np.ndarray, n_paths: int, k: int):
    """k nearest other rows per row under Russel-Rao, ties to lower index."""
    rows = _unpack(packed, n_paths)
    m = rows.shape[0]
    idx = np.full((m, k), -1, dtype=np.int32)
    dist = np.full((m, k), np.inf, dtype=np.float64)
    col_ids = np.arange(m)
    chunk = max(1, min(m, 4_000_000 // max(m, 1)))
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        block = cdist(rows[start:stop], rows, metric="russellrao")
        block[np.arange(start, stop) - start, np.arange(start, stop)] = np.inf
        for r in range(stop - start):
            order = np.lexsort((col_ids, block[r]))[:k]
            take = min(k, m - 1)
            idx[start + r, :take] = order[:take]
            dist[start + r, :take] = block[r, order[:take]]
    return idx, dist


def optimize_layout(
    pos: np.ndarray,
    heads: np.ndarray,
    tails: np.ndarray,
    epochs_per_sample: np.ndarray,
    n_epochs: int,
    a: float,
    b: float,
    gamma: float,
    initial_alpha: float,
    neg_sample_rate: int,
    sample_cum: np.ndarray,
    seed: int,
    progress=None,
    should_cancel=None,
) -> bool:
    """Epoch-synchronous layout optimization (vectorized)."""
    rng = np.random.default_rng(seed)
    m = pos.shape[0]
    total = int(sample_cum[-1]) if m else 0
    eons = epochs_per_sample.copy()
    eps_neg = epochs_per_sample / neg_sample_rate
    eonns = eps_neg.copy()

    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - epoch / n_epochs)
        active = eons <= epoch
        if active.any():
            h = heads[active]
            t = tails[active]
            diff = pos[h] - pos[t]
            d2 = np.einsum("ij,ij->i", diff, diff)
            grad = np.zeros_like(d2)
            nz = d2 > 0
            grad[nz] = (-2.0 * a * b * d2[nz] ** (b - 1.0)) / (a * d2[nz] ** b + 1.0)
            step = np.clip(grad[:, None] * diff, -4.0, 4.0) * alpha
            np.add.at(pos, h, step)
            np.add.at(pos, t, -step)
            eons[active] += epochs_per_sample[active]

            n_neg = ((epoch - eonns[active]) / eps_neg[active]).astype(np.int64)
            rep = np.repeat(h, n_neg)
            if rep.size:
                draws = rng.integers(0, total, rep.size)
                targets = np.searchsorted(sample_cum, draws, side="right").astype(np.int64)
                keep = targets != rep
                rep, targets = rep[keep], targets[keep]
                diff = pos[rep] - pos[targets]
                d2 = np.einsum("ij,ij->i", diff, diff)
                grad = np.zeros_like(d2)
                nz = d2 > 0
                grad[nz] = (2.0 * gamma * b) / ((0.001 + d2[nz]) * (a * d2[nz] ** b + 1.0))
                step = np.clip(grad[:, None] * diff, -4.0, 4.0) * alpha
                np.add.at(pos, rep, step)
            eonns[active] += n_neg * eps_neg[active]
        if progress is not None:
            progress((epoch + 1.0) / n_epochs)
        if should_cancel is not None and should_cancel():
            return False
    return True
