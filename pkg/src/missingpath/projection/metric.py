"""Russel-Rao dissimilarity over boolean missing-path rows.

d(u, v) = (n - c_TT) / n, where c_TT counts positions where both rows
are 1. Unlike Jaccard this keeps the vector indices significant, so two
rows are maximally similar only when they miss the exact same paths.
Note the consequence: d(u, u) = (n - |ones(u)|) / n, which is NOT zero
unless u is all-ones -- self-dissimilarity is nonzero for every entity
that is not missing everything.
"""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError


def russel_rao(u, v, n: int | None = None) -> float:
    """Dissimilarity between two 0/1 rows of length n."""
    u = np.asarray(u, dtype=np.uint8)
    v = np.asarray(v, dtype=np.uint8)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError("russel_rao requires two equal-length vectors")
    if n is None:
        n = u.size
    if n != u.size or n < 1:
        raise ValidationError(f"vector length {u.size} does not match n={n}")
    c_tt = int(np.sum((u != 0) & (v != 0)))
    return (n - c_tt) / n


def self_dissimilarity(rows: np.ndarray, n: int) -> np.ndarray:
    """d(u, u) per row: (n - popcount(u)) / n."""
    ones = (rows != 0).sum(axis=1)
    return (n - ones) / n


def pack_rows(rows: np.ndarray) -> np.ndarray:
    """Pack 0/1 rows into little-endian uint64 words for popcount kernels.

    Columns are padded with zero bits to a multiple of 64; the padding
    never contributes to c_TT.
    """
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    n = rows.shape[1]
    pad = (-n) % 64
    if pad:
        rows = np.hstack([rows, np.zeros((rows.shape[0], pad), dtype=np.uint8)])
    packed = np.packbits(rows, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64)
