"""Default map coloring: pick the path whose values should drive hues."""

from __future__ import annotations

from ..summaries import PathSummary


def default_color_path(summaries: list[PathSummary]) -> int | None:
    """Most covered path whose value summary offers more than one bucket.

    Summaries must be full-set summaries in path-index order (which is
    completeness-descending), so the first candidate wins; equal rates
    resolve to the lower index by the same scan. None when every path is
    single-valued: the map falls back to uniform color.
    """
    for summary in sorted(summaries, key=lambda s: s.path_index):
        if summary.values.bucket_count > 1:
            return summary.path_index
    return None
