"""Precomputed dense zones on the projected map.

Zones are density clusters in layout space (radius 3% of the map
diagonal, at least ``min_members`` points). Each zone records the paths
missing for ALL of its members -- the hover affordance of the map -- and
a convex boundary padded outward by 2% of the diagonal so degenerate
blobs remain visible.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from ..store import CompletenessMatrix
from .embed import ProjectedMap, Zone

EPS_FRACTION = 0.03
PAD_FRACTION = 0.02


def _dbscan(coords: np.ndarray, eps: float, min_samples: int) -> np.ndarray:
    """Classic DBSCAN over 2D points; label -1 marks noise.

    Deterministic: points are visited in index order and border points are
    claimed by the first cluster that reaches them.
    """
    n = len(coords)
    labels = np.full(n, -1, dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    tree = cKDTree(coords)
    neighborhoods = tree.query_ball_point(coords, r=eps)
    cluster_id = 0
    for i in range(n):
        if visited[i]:
            continue
        visited[i] = True
        seeds = neighborhoods[i]
        if len(seeds) < min_samples:
            continue
        labels[i] = cluster_id
        queue = [j for j in seeds if j != i]
        while queue:
            j = queue.pop(0)
            if labels[j] == -1:
                labels[j] = cluster_id
            if visited[j]:
                continue
            visited[j] = True
            expansion = neighborhoods[j]
            if len(expansion) >= min_samples:
                queue.extend(k for k in expansion if not visited[k] or labels[k] == -1)
        cluster_id += 1
    return labels


def _padded_boundary(points: np.ndarray, pad: float) -> list[tuple[float, float]]:
    unique = np.unique(points, axis=0)
    try:
        if len(unique) < 3:
            raise QhullError("degenerate hull")
        hull = ConvexHull(unique)
        vertices = unique[hull.vertices]
    except QhullError:
        lo = points.min(axis=0) - pad
        hi = points.max(axis=0) + pad
        return [
            (float(lo[0]), float(lo[1])),
            (float(hi[0]), float(lo[1])),
            (float(hi[0]), float(hi[1])),
            (float(lo[0]), float(hi[1])),
        ]
    center = vertices.mean(axis=0)
    out = []
    for v in vertices:
        direction = v - center
        norm = float(np.hypot(direction[0], direction[1]))
        if norm > 0:
            v = v + direction / norm * pad
        out.append((float(v[0]), float(v[1])))
    return out


def compute_zones(
    projected: ProjectedMap,
    matrix: CompletenessMatrix,
    min_members: int = 5,
) -> list[Zone]:
    """Dense clusters with their shared missing paths; empty when none."""
    coords = projected.coordinates
    if len(coords) == 0:
        return []
    diagonal = projected.diagonal()
    eps = EPS_FRACTION * diagonal
    pad = PAD_FRACTION * diagonal
    if pad == 0.0:
        pad = 0.5
    labels = _dbscan(coords, eps, min_members)

    clusters: dict[int, list[int]] = {}
    for i, label in enumerate(labels):
        if label >= 0:
            clusters.setdefault(int(label), []).append(i)
    ordered = sorted(
        (members for members in clusters.values() if len(members) >= min_members),
        key=lambda members: (-len(members), members[0]),
    )
    zones: list[Zone] = []
    for zone_id, members in enumerate(ordered):
        member_arr = np.asarray(members)
        shared_missing = np.where(matrix.bits[member_arr].all(axis=0))[0]
        zones.append(
            Zone(
                zone_id=zone_id,
                member_entity_ids=[int(i) for i in members],
                boundary=_padded_boundary(coords[member_arr], pad),
                missing_path_indices=[int(i) for i in shared_missing],
            )
        )
    return zones
