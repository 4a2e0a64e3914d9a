"""2D neighbor embedding of entities from their missing-path profiles.

The pipeline reduces rows to unique profiles first: the dissimilarity
depends only on the bit pattern, so entities sharing a profile are
interchangeable. The fuzzy neighborhood graph is then built exactly as
it would be over the raw rows -- duplicate rows occupy their profile's
nearest-neighbour slots at the self-dissimilarity distance, which keeps
local bandwidths (and therefore cluster separation) faithful to the
unreduced computation -- and the profile layout is optimized by edge
sampling. Entities are finally placed in a small deterministic disc
around their profile's position, which guarantees that identical rows
land within a fraction of the map diagonal no matter how the optimizer
behaved.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import curve_fit
from scipy.sparse.linalg import eigsh

from ..errors import MissingPathError, ValidationError
from ..store import CompletenessMatrix
from . import _backend
from .metric import pack_rows

log = logging.getLogger(__name__)

SMOOTH_K_TOLERANCE = 1e-5
MIN_K_DIST_SCALE = 1e-3
# Duplicate entities scatter in a disc of this fraction of the layout
# diagonal: pairwise spread stays under 1% of the final map diagonal.
JITTER_RADIUS_FRACTION = 0.004
NEGATIVE_SAMPLE_RATE = 5
REPULSION_STRENGTH = 1.0


class ProjectionCancelled(MissingPathError):
    """Raised when a projection job is cancelled mid-run."""


@dataclass
class ProjectionConfig:
    selected_path_indices: tuple[int, ...] | None = None  # None = all paths
    n_neighbors: int = 15
    min_dist: float = 0.1
    n_epochs: int = 200
    seed: int = 42

    def __post_init__(self):
        if self.selected_path_indices is not None:
            self.selected_path_indices = tuple(sorted(set(self.selected_path_indices)))
            if len(self.selected_path_indices) < 2:
                raise ValidationError("at least 2 paths are needed to build vectors")
        if self.n_neighbors < 2:
            raise ValidationError("n_neighbors must be >= 2")
        if self.min_dist < 0:
            raise ValidationError("min_dist must be >= 0")
        if self.n_epochs < 1:
            raise ValidationError("n_epochs must be >= 1")


@dataclass
class Zone:
    zone_id: int
    member_entity_ids: list[int]
    boundary: list[tuple[float, float]]
    missing_path_indices: list[int]


@dataclass
class ProjectedMap:
    coordinates: np.ndarray  # (n_entities, 2) float64
    zones: list[Zone]
    config_used: ProjectionConfig

    def diagonal(self) -> float:
        if len(self.coordinates) == 0:
            return 0.0
        span = self.coordinates.max(axis=0) - self.coordinates.min(axis=0)
        return float(np.hypot(span[0], span[1]))


def find_ab_params(spread: float, min_dist: float) -> tuple[float, float]:
    """Fit the differentiable attraction curve to the min_dist/spread shape."""

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2 * b))

    xv = np.linspace(0, spread * 3, 300)
    yv = np.zeros(xv.shape)
    yv[xv < min_dist] = 1.0
    yv[xv >= min_dist] = np.exp(-(xv[xv >= min_dist] - min_dist) / spread)
    params, _ = curve_fit(curve, xv, yv)
    return float(params[0]), float(params[1])


def _smooth_bandwidths(slot_dists: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Per-node (rho, sigma): rho is the nearest nonzero slot distance and
    sigma solves sum(exp(-(d - rho)/sigma)) = log2(#slots) by bisection."""
    m = len(slot_dists)
    rho = np.zeros(m)
    sigma = np.zeros(m)
    for i, dists in enumerate(slot_dists):
        if dists.size == 0:
            sigma[i] = 1.0
            continue
        nonzero = dists[dists > 0.0]
        rho[i] = nonzero[0] if nonzero.size else 0.0
        target = math.log2(dists.size) if dists.size > 1 else 1.0
        lo, hi, mid = 0.0, math.inf, 1.0
        for _ in range(64):
            psum = float(np.exp(-np.maximum(dists - rho[i], 0.0) / mid).sum())
            if abs(psum - target) < SMOOTH_K_TOLERANCE:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == math.inf else (lo + hi) / 2.0
        sigma[i] = mid
        mean_d = float(dists.mean())
        if rho[i] > 0.0 and mean_d > 0.0:
            sigma[i] = max(sigma[i], MIN_K_DIST_SCALE * mean_d)
    return rho, sigma


def _spectral_init(graph: sp.csr_matrix, m: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenvector initialization of the layout; random fallback on failure.

    The bottom eigenvectors of the normalized Laplacian L are found as the
    TOP eigenvectors of 2I - L, which ARPACK converges on in milliseconds
    where a small-magnitude search stalls for minutes on large graphs.
    """
    if m <= 2 or graph.nnz == 0:
        return rng.uniform(-10.0, 10.0, size=(m, 2))
    try:
        degrees = np.asarray(graph.sum(axis=1)).ravel()
        degrees[degrees == 0.0] = 1.0
        d_inv = sp.diags(1.0 / np.sqrt(degrees))
        flipped = sp.identity(m) + d_inv @ graph @ d_inv  # = 2I - L
        k = min(3, m - 1)
        vals, vecs = eigsh(
            flipped.tocsc(), k=k, which="LM", v0=np.ones(m), tol=1e-4, maxiter=m * 5
        )
        order = np.argsort(2.0 - vals)[1:3]
        emb = vecs[:, order]
        if emb.shape[1] < 2:
            raise ValueError("not enough eigenvectors")
        for col in range(2):
            anchor = int(np.argmax(np.abs(emb[:, col])))
            if emb[anchor, col] < 0:
                emb[:, col] = -emb[:, col]
        max_abs = np.abs(emb).max()
        if max_abs == 0.0:
            raise ValueError("degenerate eigenvectors")
        emb = emb * (10.0 / max_abs)
        return emb + rng.normal(0.0, 1e-4, size=(m, 2))
    except Exception as exc:
        log.debug("spectral init failed (%s); using random init", exc)
        return rng.uniform(-10.0, 10.0, size=(m, 2))


def _profile_graph(
    profiles: np.ndarray,
    counts: np.ndarray,
    n_paths: int,
    n_neighbors: int,
    kernels,
):
    """Fuzzy neighborhood graph over unique profiles, raw-row equivalent.

    Returns (heads, tails, epochs_per_sample weights, symmetric graph for
    init). Self-edges carry the duplicate-row neighbourhoods: they produce
    no attraction (zero distance) but drive repulsive sampling exactly as
    the duplicate edges would over raw rows.
    """
    m = profiles.shape[0]
    total_rows = int(counts.sum())
    k_eff = min(n_neighbors, total_rows - 1)
    if k_eff < n_neighbors:
        log.warning(
            "n_neighbors=%d exceeds available rows; shrunk to %d", n_neighbors, k_eff
        )
    k_prof = min(k_eff, m - 1)

    packed = pack_rows(profiles)
    nn_idx, nn_dist = kernels.knn_packed(packed, n_paths, max(k_prof, 1))
    ones = (profiles != 0).sum(axis=1)
    d_self = (n_paths - ones) / n_paths

    slot_dists: list[np.ndarray] = []
    for i in range(m):
        slots = [d_self[i]] * min(int(counts[i]) - 1, k_eff)
        for j_pos in range(k_prof):
            if len(slots) >= k_eff:
                break
            j = int(nn_idx[i, j_pos])
            if j < 0:
                break
            take = min(int(counts[j]), k_eff - len(slots))
            slots.extend([float(nn_dist[i, j_pos])] * take)
        slot_dists.append(np.asarray(slots, dtype=np.float64))
    rho, sigma = _smooth_bandwidths(slot_dists)

    rows, cols, vals = [], [], []
    for i in range(m):
        for j_pos in range(k_prof):
            j = int(nn_idx[i, j_pos])
            if j < 0:
                break
            w = math.exp(-max(nn_dist[i, j_pos] - rho[i], 0.0) / max(sigma[i], 1e-12))
            if w > 0.0:
                rows.append(i)
                cols.append(j)
                vals.append(w)
    cross = sp.coo_matrix((vals, (rows, cols)), shape=(m, m)).tocsr()
    sym = cross + cross.T - cross.multiply(cross.T)
    sym_coo = sym.tocoo()

    heads = list(sym_coo.row)
    tails = list(sym_coo.col)
    weights = list(sym_coo.data)
    for i in range(m):
        twin_slots = min(int(counts[i]) - 1, k_eff)
        heads.extend([i] * twin_slots)
        tails.extend([i] * twin_slots)
        weights.extend([1.0] * twin_slots)

    heads = np.asarray(heads, dtype=np.int32)
    tails = np.asarray(tails, dtype=np.int32)
    weights = np.asarray(weights, dtype=np.float64)
    order = np.lexsort((tails, heads))
    heads, tails, weights = heads[order], tails[order], weights[order]
    return heads, tails, weights, sym.tocsr()


def project(
    matrix: CompletenessMatrix,
    cfg: ProjectionConfig | None = None,
    progress=None,
    should_cancel=None,
    kernels=None,
) -> ProjectedMap:
    """Embed all entities into 2D from the completeness matrix.

    Deterministic for a fixed seed and backend. ``progress`` receives a
    fraction in [0, 1]; ``should_cancel`` is polled between epochs and a
    True return aborts with :class:`ProjectionCancelled`.
    """
    cfg = cfg or ProjectionConfig()
    kernels = kernels or _backend.active
    selected = cfg.selected_path_indices
    if selected is None:
        selected = tuple(range(matrix.n_paths))
        if len(selected) < 2:
            raise ValidationError("at least 2 paths are needed to build vectors")
    if max(selected, default=0) >= matrix.n_paths:
        raise ValidationError("selected path index out of range")

    n_entities = matrix.n_entities
    if n_entities == 0:
        return ProjectedMap(
            coordinates=np.zeros((0, 2)), zones=[], config_used=cfg
        )

    rows = np.ascontiguousarray(matrix.bits[:, selected])
    profiles, inverse, counts = np.unique(
        rows, axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.ravel()
    m = profiles.shape[0]
    rng = np.random.default_rng(cfg.seed)

    if m == 1:
        positions = np.zeros((1, 2))
        if progress is not None:
            progress(1.0)
    else:
        heads, tails, weights, sym = _profile_graph(
            profiles, counts, len(selected), cfg.n_neighbors, kernels
        )
        positions = np.ascontiguousarray(_spectral_init(sym, m, rng))
        if weights.size:
            max_w = float(weights.max())
            keep = weights >= max_w / cfg.n_epochs
            heads, tails, weights = heads[keep], tails[keep], weights[keep]
            epochs_per_sample = max_w / weights
            a, b = find_ab_params(1.0, cfg.min_dist)
            sample_cum = np.cumsum(counts).astype(np.int64)
            done = kernels.optimize_layout(
                positions,
                heads,
                tails,
                epochs_per_sample,
                cfg.n_epochs,
                a,
                b,
                REPULSION_STRENGTH,
                1.0,
                NEGATIVE_SAMPLE_RATE,
                sample_cum,
                cfg.seed,
                progress,
                should_cancel,
            )
            if not done:
                raise ProjectionCancelled("projection cancelled")
        elif progress is not None:
            progress(1.0)

    span = positions.max(axis=0) - positions.min(axis=0)
    diagonal = float(np.hypot(span[0], span[1])) if m > 1 else 0.0
    radius = JITTER_RADIUS_FRACTION * diagonal
    jitter_rng = np.random.default_rng(cfg.seed + 1)
    draws = jitter_rng.uniform(size=(n_entities, 2))
    multi = counts[inverse] > 1
    r = radius * np.sqrt(draws[:, 0])
    theta = 2.0 * np.pi * draws[:, 1]
    offsets = np.where(
        multi[:, None], np.column_stack([r * np.cos(theta), r * np.sin(theta)]), 0.0
    )
    coordinates = positions[inverse] + offsets
    return ProjectedMap(coordinates=coordinates, zones=[], config_used=cfg)
