"""Summaries: 5% bucketing, date binning, KS test, comparison flags."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from missingpath.errors import ValidationError
from missingpath.harvest import EntityIndex
from missingpath.paths import PathPattern
from missingpath.store import EntityVectorStore, PathCell
from missingpath.summaries import (
    SummaryConfig,
    auto_granularity,
    bin_dates,
    compare,
    ks_two_sample,
    summarize,
    truncate_date,
)

KS_REFERENCE = Path(__file__).parent / "fixtures" / "ks_reference.json"


def store_from_counts(counts: dict[str, int]) -> EntityVectorStore:
    """One path; one entity per value occurrence (single-valued cells)."""
    index = EntityIndex()
    cells = []
    eid = 0
    for key, n in counts.items():
        for _ in range(n):
            index.add(f"http://example.org/e{eid}")
            cells.append([PathCell(values=(key,))])
            eid += 1
    paths = [PathPattern(0, ("http://example.org/p",), 1, 1.0, eid, "ex:p")]
    return EntityVectorStore(entity_index=index, paths=paths, by_entity=cells)


class TestBucketing:
    def test_five_percent_rule(self):
        store = store_from_counts({"A": 50, "B": 30, "C": 15, "D": 3, "E": 2})
        summary = summarize(range(100), 0, store)
        assert [(b.key, b.count) for b in summary.values.buckets] == [
            ("A", 50),
            ("B", 30),
            ("C", 15),
        ]
        assert summary.values.other_count == 5
        assert set(summary.values.other_keys) == {"D", "E"}

    def test_exactly_at_threshold_stays_detailed(self):
        store = store_from_counts({f"v{i:02d}": 1 for i in range(20)})
        summary = summarize(range(20), 0, store)
        assert len(summary.values.buckets) == 20
        assert summary.values.other_count == 0

    def test_empty_entity_set(self):
        store = store_from_counts({"A": 3})
        summary = summarize([], 0, store)
        assert summary.completeness_in_set == 0.0
        assert summary.values.buckets == []
        assert summary.values.other_count == 0

    def test_multivalued_entities_count_multiply(self):
        index = EntityIndex()
        index.add("http://example.org/e0")
        paths = [PathPattern(0, ("http://example.org/p",), 1, 1.0, 1, "ex:p")]
        store = EntityVectorStore(
            entity_index=index,
            paths=paths,
            by_entity=[[PathCell(values=("x", "x", "y"))]],
        )
        summary = summarize([0], 0, store)
        assert summary.values.total == 3
        assert {(b.key, b.count) for b in summary.values.buckets} == {("x", 2), ("y", 1)}

    def test_other_is_selector_with_member_keys(self):
        store = store_from_counts({"A": 97, "d1": 1, "d2": 1, "d3": 1})
        summary = summarize(range(100), 0, store)
        assert summary.values.other_count == 3
        assert set(summary.values.other_keys) == {"d1", "d2", "d3"}

    @given(
        counts=st.dictionaries(
            st.text(min_size=1, max_size=4), st.integers(1, 40), min_size=1, max_size=12
        ),
        threshold=st.sampled_from([0.01, 0.05, 0.2, 0.5]),
    )
    @settings(max_examples=60, deadline=None)
    def test_conservation_property(self, counts, threshold):
        store = store_from_counts(counts)
        cfg = SummaryConfig(detail_threshold=threshold)
        summary = summarize(range(store.n_entities), 0, store, cfg)
        fs = summary.values
        assert sum(b.count for b in fs.buckets) + fs.other_count == fs.total
        assert fs.total == sum(counts.values())
        # every detailed bucket is at or above the threshold
        for b in fs.buckets:
            assert b.count >= threshold * fs.total - 1e-9

    @given(
        counts=st.dictionaries(
            st.text(min_size=1, max_size=4), st.integers(1, 40), min_size=1, max_size=12
        )
    )
    @settings(max_examples=40, deadline=None)
    def test_other_monotone_in_threshold(self, counts):
        store = store_from_counts(counts)
        previous = -1
        for threshold in (0.02, 0.05, 0.1, 0.3, 0.6):
            summary = summarize(
                range(store.n_entities), 0, store, SummaryConfig(detail_threshold=threshold)
            )
            assert summary.values.other_count >= previous
            previous = summary.values.other_count


class TestDates:
    def test_truncation_keys(self):
        assert truncate_date("2019-03-07T14:33:01Z", "year") == "2019"
        assert truncate_date("2019-03-07T14:33:01Z", "month") == "2019-03"
        assert truncate_date("2019-03-07T14:33:01Z", "day") == "2019-03-07"
        assert truncate_date("2019-03-07T14:33:01Z", "hour") == "2019-03-07T14"
        assert truncate_date("1998", "year") == "1998"
        assert truncate_date("1998", "month") is None
        assert truncate_date("not a date", "year") is None

    def test_year_binning_reproduces_modification_profile(self):
        # 4150/4423/460 across three years plus 100 below-threshold stragglers.
        values = (
            ["2018-06-01T00:00:00Z"] * 4150
            + ["2019-01-02T00:00:00Z"] * 4423
            + ["2020-03-04T00:00:00Z"] * 460
            + ["2014-01-01T00:00:00Z"] * 25
            + ["2015-01-01T00:00:00Z"] * 25
            + ["2016-01-01T00:00:00Z"] * 25
            + ["2017-01-01T00:00:00Z"] * 25
        )
        facet = bin_dates(values, "year")
        got = {b.key: b.count for b in facet.buckets}
        assert got == {"2018": 4150, "2019": 4423, "2020": 460}
        assert facet.other_count == 100

    def test_single_month_single_bucket(self):
        values = [f"2021-07-{d:02d}" for d in range(1, 20)]
        facet = bin_dates(values, "month")
        assert [(b.key, b.count) for b in facet.buckets] == [("2021-07", 19)]

    def test_garbage_routes_to_other(self):
        facet = bin_dates(["2020-01-01", "2020-05-05", "garbage", "2020-06-06"], "year")
        assert facet.buckets[0].key == "2020"
        assert facet.buckets[0].count == 3
        assert facet.other_count == 1
        assert "garbage" in facet.other_keys

    def test_auto_granularity_spanning_years(self):
        values = ["2018-01-01", "2019-06-01", "2020-12-31"] * 5
        assert auto_granularity(values) == "year"

    def test_auto_granularity_same_day(self):
        values = [f"2020-05-17T{h:02d}:00:00Z" for h in range(8, 14)] * 3
        assert auto_granularity(values) == "hour"

    def test_auto_granularity_single_timestamp_falls_back(self):
        assert auto_granularity(["2020-05-17T08:00:00Z"] * 7) == "year"


class TestKS:
    def test_identical_samples(self):
        result = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert result.statistic == 0.0
        assert result.p_value == 1.0

    def test_hand_checked_statistic(self):
        result = ks_two_sample([0.1, 0.4, 0.5], [0.2, 0.3, 0.5])
        assert result.statistic == pytest.approx(1 / 3, abs=1e-12)

    def test_disjoint_samples(self):
        result = ks_two_sample([0.0, 0.0], [1.0, 1.0])
        assert result.statistic == 1.0

    def test_empty_sample_rejected(self):
        with pytest.raises(ValidationError):
            ks_two_sample([], [1.0])

    def test_matches_reference_fixtures(self):
        records = json.loads(KS_REFERENCE.read_text(encoding="utf-8"))
        assert len(records) == 20
        for record in records:
            result = ks_two_sample(record["a"], record["b"])
            assert result.statistic == pytest.approx(record["d"], abs=1e-6)
            assert result.p_value == pytest.approx(record["p"], abs=1e-6)

    @given(
        a=st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=30),
        b=st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=30),
    )
    @settings(max_examples=60, deadline=None)
    def test_agrees_with_oracle_everywhere(self, a, b):
        d_ref, p_ref = oracles.ks_reference(a, b)
        result = ks_two_sample(a, b)
        assert result.statistic == pytest.approx(d_ref, abs=1e-9)
        assert result.p_value == pytest.approx(p_ref, abs=1e-6)


def two_path_store(cells_by_entity) -> EntityVectorStore:
    index = EntityIndex()
    for i in range(len(cells_by_entity)):
        index.add(f"http://example.org/e{i}")
    paths = [
        PathPattern(0, ("http://example.org/p0",), 1, 1.0, len(cells_by_entity), "ex:p0"),
        PathPattern(1, ("http://example.org/p1",), 1, 0.5, 0, "ex:p1"),
    ]
    return EntityVectorStore(entity_index=index, paths=paths, by_entity=cells_by_entity)


class TestCompare:
    def test_full_vs_full_is_never_pink(self):
        store = store_from_counts({"A": 40, "B": 30, "C": 20, "D": 10})
        full = summarize(range(100), 0, store)
        flag = compare(full, full)
        assert not flag.significantly_different
        assert not flag.missing_in_subset
        for result in flag.ks_results:
            assert result.p_value == 1.0

    def test_missing_path_is_yellow(self):
        cells = [[PathCell(values=("x",)), None] for _ in range(10)]
        store = two_path_store(cells)
        full = summarize(range(10), 1, store)
        subset = summarize(range(5), 1, store)
        flag = compare(full, subset)
        assert flag.missing_in_subset

    def test_disjoint_dominant_values_flag_matches_oracle(self):
        # Full set dominated by A, subset (drawn from the B-side) by B.
        counts = {"A": 60, "B": 40}
        store = store_from_counts(counts)
        full = summarize(range(100), 0, store)
        subset_ids = range(60, 100)  # the B entities
        subset = summarize(subset_ids, 0, store)
        flag = compare(full, subset)
        freq_full = [0.6, 0.4]
        freq_subset = [0.0, 1.0]
        _, p = oracles.ks_reference(freq_full, freq_subset)
        assert flag.significantly_different == (p < 0.1)

    def test_flag_threshold_is_strict(self):
        cfg = SummaryConfig(significance_alpha=0.1)
        store = store_from_counts({"A": 10, "B": 10})
        full = summarize(range(20), 0, store)
        flag = compare(full, full, cfg)
        # p == 1.0 so min-p < alpha must be False via strict comparison
        assert not flag.significantly_different
