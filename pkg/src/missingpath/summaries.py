"""Bucketed value distributions and subset-vs-full significance flags.

A path summary counts terminal-value occurrences for an entity set over
three facets (values, datatypes, languages). Buckets individually below
the detail threshold (default 5% of the facet's occurrences, strictly
below) are merged into an OTHER aggregate that remembers its member keys
so it can still drive selections. Date-like values can be binned by
year/month/day/hour before bucketing.

Subset/full comparison aligns the two bucket lists, normalises counts to
frequencies and runs a two-sample Kolmogorov-Smirnov test per facet;
the subset is flagged when any facet's p-value crosses the significance
level. Running the KS test on frequency vectors is unusual for
categorical data but is exactly what the interactive flags are defined
as, so it is kept.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import kolmogorov

from .errors import ValidationError
from .store import FACETS, EntityVectorStore

GRANULARITIES = ("year", "month", "day", "hour")

_DATE_RE = re.compile(
    r"^(\d{4})"
    r"(?:-(\d{2})"
    r"(?:-(\d{2})"
    r"(?:[T ](\d{2})"
    r"(?::\d{2}(?::\d{2}(?:\.\d+)?)?)?"
    r"(?:Z|[+-]\d{2}:?\d{2})?"
    r")?)?)?$"
)


@dataclass
class SummaryConfig:
    detail_threshold: float = 0.05
    significance_alpha: float = 0.1
    date_granularities: tuple[str, ...] = GRANULARITIES

    def __post_init__(self):
        if not (0 < self.detail_threshold < 1):
            raise ValidationError("detail_threshold must be in (0, 1)")
        if not (0 < self.significance_alpha < 1):
            raise ValidationError("significance_alpha must be in (0, 1)")


@dataclass(frozen=True)
class Bucket:
    key: str
    count: int
    # Raw keys this bucket aggregates (date bins); None when key is the raw value.
    member_keys: tuple[str, ...] | None = None


@dataclass
class FacetSummary:
    buckets: list[Bucket]
    other_count: int
    other_keys: tuple[str, ...]
    total: int
    unique_count: int

    @property
    def bucket_count(self) -> int:
        """Detailed buckets plus the OTHER aggregate when it is non-empty."""
        return len(self.buckets) + (1 if self.other_count > 0 else 0)


@dataclass
class PathSummary:
    path_index: int
    entity_count: int
    completeness_in_set: float
    values: FacetSummary
    datatypes: FacetSummary
    languages: FacetSummary
    unique_value_count: int

    def facet(self, name: str) -> FacetSummary:
        if name not in FACETS:
            raise ValidationError(f"unknown facet {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    facet: str


@dataclass
class ComparisonFlag:
    path_index: int
    missing_in_subset: bool
    significantly_different: bool
    ks_results: list[KSResult] = field(default_factory=list)


def _detail_cutoff(threshold: float, total: int) -> Fraction:
    # Exact arithmetic: 1 occurrence out of 20 at the 5% threshold is kept.
    return Fraction(str(threshold)) * total


def _bucketize(
    key_counts: dict[str, int],
    threshold: float,
    members: dict[str, tuple[str, ...]] | None = None,
    forced_other: dict[str, int] | None = None,
) -> FacetSummary:
    """Apply the detail threshold; strictly-below counts merge into OTHER."""
    total = sum(key_counts.values()) + sum((forced_other or {}).values())
    cutoff = _detail_cutoff(threshold, total)
    detailed: list[Bucket] = []
    other_count = 0
    other_keys: list[str] = []
    for key, count in key_counts.items():
        if Fraction(count) >= cutoff:
            detailed.append(
                Bucket(key=key, count=count, member_keys=(members or {}).get(key))
            )
        else:
            other_count += count
            if members and key in members:
                other_keys.extend(members[key])
            else:
                other_keys.append(key)
    for key, count in (forced_other or {}).items():
        other_count += count
        other_keys.append(key)
    detailed.sort(key=lambda b: (-b.count, b.key))
    unique = len(key_counts) if members is None else sum(
        len(members.get(k, (k,))) for k in key_counts
    )
    return FacetSummary(
        buckets=detailed,
        other_count=other_count,
        other_keys=tuple(sorted(set(other_keys))),
        total=total,
        unique_count=unique + len(forced_other or {}),
    )


def truncate_date(value: str, granularity: str) -> str | None:
    """Truncated ISO representation, or None when the value cannot support it."""
    m = _DATE_RE.match(value.strip())
    if m is None:
        return None
    year, month, day, hour = m.groups()
    if granularity == "year":
        return year
    if granularity == "month":
        return f"{year}-{month}" if month else None
    if granularity == "day":
        return f"{year}-{month}-{day}" if day else None
    if granularity == "hour":
        return f"{year}-{month}-{day}T{hour}" if hour else None
    raise ValidationError(f"unknown granularity {granularity!r}")


def _bin_key_counts(
    key_counts: dict[str, int], granularity: str
) -> tuple[dict[str, int], dict[str, tuple[str, ...]], dict[str, int]]:
    bins: dict[str, int] = {}
    members: dict[str, list[str]] = {}
    unparsed: dict[str, int] = {}
    for key, count in key_counts.items():
        binned = truncate_date(key, granularity)
        if binned is None:
            unparsed[key] = unparsed.get(key, 0) + count
        else:
            bins[binned] = bins.get(binned, 0) + count
            members.setdefault(binned, []).append(key)
    return bins, {k: tuple(sorted(v)) for k, v in members.items()}, unparsed


def bin_dates(
    values: list[str], granularity: str, threshold: float = 0.05
) -> FacetSummary:
    """Bin date-like values at the given granularity, then apply the
    detail threshold to the bins. Values that do not parse go to OTHER."""
    key_counts: dict[str, int] = {}
    for v in values:
        key_counts[v] = key_counts.get(v, 0) + 1
    bins, members, unparsed = _bin_key_counts(key_counts, granularity)
    return _bucketize(bins, threshold, members=members, forced_other=unparsed)


def auto_granularity(values: list[str], cfg: SummaryConfig | None = None) -> str:
    """Coarsest granularity giving at least two detailed bins; year otherwise."""
    cfg = cfg or SummaryConfig()
    for granularity in cfg.date_granularities:
        facet = bin_dates(values, granularity, cfg.detail_threshold)
        if len(facet.buckets) >= 2:
            return granularity
    return cfg.date_granularities[0]


def looks_date_like(keys: list[str]) -> bool:
    """Heuristic used to decide whether a values facet should be binned."""
    if not keys:
        return False
    parsed = sum(1 for k in keys if _DATE_RE.match(k.strip()))
    return parsed * 2 >= len(keys)


def summarize(
    entity_ids,
    path_index: int,
    store: EntityVectorStore,
    cfg: SummaryConfig | None = None,
    granularity: str | None = None,
) -> PathSummary:
    """Bucketed distribution of one path's terminal values over an entity set.

    Occurrences are counted per value instance, so multi-valued entities
    contribute multiply. ``granularity`` bins the values facet by date;
    pass ``"auto"`` to pick one with :func:`auto_granularity`.
    """
    cfg = cfg or SummaryConfig()
    if not (0 <= path_index < store.n_paths):
        raise ValidationError(f"unknown path index {path_index}")
    ids = sorted(set(int(i) for i in entity_ids))
    for i in ids:
        if not (0 <= i < store.n_entities):
            raise ValidationError(f"unknown entity id {i}")
    bitmap = np.zeros(store.n_entities, dtype=bool)
    bitmap[ids] = True

    facet_summaries: dict[str, FacetSummary] = {}
    present = 0
    for eid in ids:
        if store.cell(eid, path_index) is not None:
            present += 1

    for facet in FACETS:
        ent, codes, keys = store.facet_occurrences(path_index, facet)
        if len(ent):
            mask = bitmap[ent]
            counts = np.bincount(codes[mask], minlength=len(keys))
        else:
            counts = np.zeros(0, dtype=np.int64)
        key_counts = {keys[i]: int(counts[i]) for i in np.nonzero(counts)[0]}
        if facet == "values" and granularity is not None and key_counts:
            g = granularity
            if g == "auto":
                flat = [k for k, n in key_counts.items() for _ in range(n)]
                g = auto_granularity(flat, cfg)
            bins, members, unparsed = _bin_key_counts(key_counts, g)
            facet_summaries[facet] = _bucketize(
                bins, cfg.detail_threshold, members=members, forced_other=unparsed
            )
        else:
            facet_summaries[facet] = _bucketize(key_counts, cfg.detail_threshold)

    return PathSummary(
        path_index=path_index,
        entity_count=len(ids),
        completeness_in_set=(present / len(ids)) if ids else 0.0,
        values=facet_summaries["values"],
        datatypes=facet_summaries["datatypes"],
        languages=facet_summaries["languages"],
        unique_value_count=facet_summaries["values"].unique_count,
    )


def ks_two_sample(a, b) -> KSResult:
    """Two-sample Kolmogorov-Smirnov test.

    D is the supremum distance between the two empirical CDFs; the p-value
    comes from the asymptotic Kolmogorov distribution at effective size
    sqrt(m*n/(m+n)). No exact small-sample mode is used, so results are
    reproducible across sample sizes.
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValidationError("ks_two_sample requires non-empty samples")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = np.sqrt(a.size * b.size / (a.size + b.size))
    p = float(np.clip(kolmogorov(en * d), 0.0, 1.0))
    return KSResult(statistic=d, p_value=p, facet="")


def _aligned_frequencies(full: FacetSummary, subset: FacetSummary):
    """Count vectors over the union of bucket keys, OTHER aligned to OTHER."""
    keys: list[str] = [b.key for b in full.buckets]
    seen = set(keys)
    for b in subset.buckets:
        if b.key not in seen:
            seen.add(b.key)
            keys.append(b.key)
    full_counts = {b.key: b.count for b in full.buckets}
    subset_counts = {b.key: b.count for b in subset.buckets}
    va = [float(full_counts.get(k, 0)) for k in keys]
    vb = [float(subset_counts.get(k, 0)) for k in keys]
    if full.other_count > 0 or subset.other_count > 0:
        va.append(float(full.other_count))
        vb.append(float(subset.other_count))
    ta, tb = sum(va), sum(vb)
    if ta == 0 or tb == 0:
        return None
    return [v / ta for v in va], [v / tb for v in vb]


def compare(
    full: PathSummary, subset: PathSummary, cfg: SummaryConfig | None = None
) -> ComparisonFlag:
    """Flags for the mirrored view: yellow when the path is entirely missing
    in the subset, pink when any facet differs significantly from the full set."""
    cfg = cfg or SummaryConfig()
    if full.path_index != subset.path_index:
        raise ValidationError("summaries describe different paths")
    results: list[KSResult] = []
    for facet in FACETS:
        aligned = _aligned_frequencies(full.facet(facet), subset.facet(facet))
        if aligned is None:
            continue
        ks = ks_two_sample(aligned[0], aligned[1])
        results.append(KSResult(statistic=ks.statistic, p_value=ks.p_value, facet=facet))
    significant = any(r.p_value < cfg.significance_alpha for r in results)
    return ComparisonFlag(
        path_index=full.path_index,
        missing_in_subset=subset.completeness_in_set == 0.0,
        significantly_different=significant,
        ks_results=results,
    )

