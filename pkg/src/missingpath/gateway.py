"""SPARQL data-source abstraction.

Seven structured query shapes cover everything the engine asks of a data
source. For remote endpoints they render to SPARQL 1.1 SELECT text sent
over the SPARQL protocol; for offline use they are evaluated directly by
the in-memory fixture store. Both paths truncate at the endpoint quota.
"""

from __future__ import annotations

import enum
import json
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import DecodeError, EndpointError, TransportError, ValidationError
from .fixture import FixtureStore, evaluate, load_fixture
from .terms import RDF_TYPE, Term, literal, uri

MAX_PATH_DEPTH = 8
ENV_ENDPOINT = "MISSINGPATH_ENDPOINT"

_URI_FORBIDDEN = re.compile(r'[<>"{}|^`\\\x00-\x20]')


class QueryKind(enum.Enum):
    DISTINCT_PREDICATES_AT_DEPTH = "DistinctPredicatesAtDepth"
    COUNT_ENTITIES_WITH_PATH = "CountEntitiesWithPath"
    COUNT_ALL_ENTITIES = "CountAllEntities"
    VALUE_HISTOGRAM_AT_PATH = "ValueHistogramAtPath"
    ENTITIES_WITH_VALUE_AT_PATH = "EntitiesWithValueAtPath"
    ENTITIES_WITHOUT_PATH = "EntitiesWithoutPath"
    TERMINAL_VALUES_FOR_ALL_ENTITIES = "TerminalValuesForAllEntities"


@dataclass(frozen=True)
class StructuredQuery:
    kind: QueryKind
    class_uri: str
    path: tuple[str, ...] = ()
    value: Term | None = None
    limit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        for u in (self.class_uri, *self.path):
            _check_uri(u)
        if self.value is not None and self.value.is_uri:
            _check_uri(self.value.text)
        if len(self.path) > MAX_PATH_DEPTH:
            raise ValidationError(f"path depth {len(self.path)} exceeds {MAX_PATH_DEPTH}")
        if self.kind is QueryKind.ENTITIES_WITH_VALUE_AT_PATH:
            if not self.path or self.value is None:
                raise ValidationError("EntitiesWithValueAtPath requires a non-empty path and a value")
        if self.limit is not None and self.limit < 1:
            raise ValidationError("limit must be positive")


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValidationError("row width does not match columns")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class EndpointConfig:
    """Where to send queries and how the endpoint behaves.

    ``base_url`` is either an http(s) URL or a path to an N-Triples
    fixture file. ``quota`` is the endpoint's hard cap on result rows.
    """

    base_url: str
    quota: int = 10000
    request_timeout: float = 30.0
    max_in_flight: int = 4
    retries: int = 3
    retry_base_delay: float = 0.5

    def __post_init__(self):
        if self.quota < 1:
            raise ValidationError("quota must be >= 1")

    def resolved_url(self) -> str:
        return os.environ.get(ENV_ENDPOINT) or self.base_url


def _check_uri(text: str) -> None:
    if not text or _URI_FORBIDDEN.search(text):
        raise ValidationError(f"malformed URI: {text!r}")


# -- SPARQL rendering --------------------------------------------------------


def _term_sparql(term: Term) -> str:
    if term.is_uri:
        return f"<{term.text}>"
    escaped = term.text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    if term.lang:
        return f'"{escaped}"@{term.lang}'
    if term.datatype:
        return f'"{escaped}"^^<{term.datatype}>'
    return f'"{escaped}"'


def _chain(path: tuple[str, ...], start: str = "?e", terminal: str | None = None) -> list[str]:
    """Triple patterns walking ``path`` from ``start``.

    The last step binds ``terminal`` if given, else ``?v{depth}``.
    """
    lines = []
    current = start
    for i, predicate in enumerate(path):
        is_last = i == len(path) - 1
        nxt = terminal if (is_last and terminal) else f"?v{i + 1}"
        lines.append(f"  {current} <{predicate}> {nxt} .")
        current = nxt
    return lines


def render_sparql(q: StructuredQuery) -> str:
    """Render a structured query as SPARQL 1.1 SELECT text (deterministic)."""
    base = f"  ?e a <{q.class_uri}> ."
    kind = q.kind

    if kind is QueryKind.COUNT_ALL_ENTITIES:
        body = [base]
        head = "SELECT (COUNT(DISTINCT ?e) AS ?count)"
        tail = ""
    elif kind is QueryKind.COUNT_ENTITIES_WITH_PATH:
        body = [base] + _chain(q.path)
        head = "SELECT (COUNT(DISTINCT ?e) AS ?count)"
        tail = ""
    elif kind is QueryKind.DISTINCT_PREDICATES_AT_DEPTH:
        body = [base] + _chain(q.path) + [
            f"  {'?v' + str(len(q.path)) if q.path else '?e'} ?p ?o .",
            f"  FILTER (?p != <{RDF_TYPE}>)",
        ]
        head = "SELECT DISTINCT ?p"
        tail = "\nORDER BY ?p"
    elif kind is QueryKind.VALUE_HISTOGRAM_AT_PATH:
        body = [base] + _chain(q.path, terminal="?value")
        head = "SELECT ?value (COUNT(DISTINCT ?e) AS ?count)"
        tail = "\nGROUP BY ?value\nORDER BY DESC(?count) ?value"
    elif kind is QueryKind.ENTITIES_WITH_VALUE_AT_PATH:
        body = [base] + _chain(q.path, terminal=_term_sparql(q.value))
        head = "SELECT DISTINCT ?e"
        tail = "\nORDER BY ?e"
    elif kind is QueryKind.ENTITIES_WITHOUT_PATH:
        inner = "\n".join(_chain(q.path)) if q.path else ""
        body = [base]
        if inner:
            body.append("  FILTER NOT EXISTS {\n" + inner + "\n  }")
        head = "SELECT DISTINCT ?e"
        tail = "\nORDER BY ?e"
    elif kind is QueryKind.TERMINAL_VALUES_FOR_ALL_ENTITIES:
        if q.path:
            body = [base] + _chain(q.path, terminal="?value")
        else:
            # Zero-length chains terminate at the entity itself.
            body = [base, "  BIND (?e AS ?value)"]
        head = "SELECT ?e ?value (DATATYPE(?value) AS ?datatype) (LANG(?value) AS ?language)"
        tail = "\nORDER BY ?e ?value"
    else:  # pragma: no cover - exhaustive
        raise ValidationError(f"unsupported query kind {kind}")

    limit = f"\nLIMIT {q.limit}" if q.limit is not None else ""
    return head + " WHERE {\n" + "\n".join(body) + "\n}" + tail + limit


# -- result decoding ---------------------------------------------------------


def _decode_sparql_json(payload: bytes) -> ResultTable:
    try:
        doc = json.loads(payload)
        columns = doc["head"]["vars"]
        bindings = doc["results"]["bindings"]
    except (ValueError, KeyError, TypeError) as exc:
        raise DecodeError(f"malformed SPARQL results document: {exc}") from exc
    rows = []
    for binding in bindings:
        row = []
        for var in columns:
            cell = binding.get(var)
            if cell is None:
                row.append(None)
                continue
            if cell.get("type") == "uri":
                row.append(uri(cell["value"]))
            else:
                row.append(
                    literal(
                        cell["value"],
                        datatype=cell.get("datatype"),
                        lang=cell.get("xml:lang"),
                    )
                )
        rows.append(tuple(row))
    return ResultTable(columns=list(columns), rows=rows)


# -- gateway -----------------------------------------------------------------


class Gateway:
    """Executes structured queries against one endpoint or fixture.

    Stateless per request; a semaphore caps concurrent in-flight HTTP
    requests so public endpoints are not hammered.
    """

    def __init__(self, cfg: EndpointConfig):
        self.cfg = cfg
        self._store: FixtureStore | None = None
        url = cfg.resolved_url()
        self._remote = url.startswith("http://") or url.startswith("https://")
        self._url = url
        if not self._remote:
            try:
                self._store = load_fixture(url)
            except FileNotFoundError as exc:
                raise TransportError(f"fixture not found: {url}") from exc
        self._gate = threading.BoundedSemaphore(cfg.max_in_flight)
        self._session = requests.Session() if self._remote else None

    @property
    def is_remote(self) -> bool:
        return self._remote

    @property
    def store(self) -> FixtureStore | None:
        return self._store

    def execute(self, q: StructuredQuery) -> ResultTable:
        if self._remote:
            return self._execute_http(q)
        columns, rows = evaluate(self._store, q, self.cfg.quota)
        return ResultTable(columns=columns, rows=rows)

    def execute_many(self, queries: list[StructuredQuery]) -> list[ResultTable]:
        """Run queries concurrently (bounded), results in input order."""
        if not self._remote or len(queries) <= 1:
            return [self.execute(q) for q in queries]
        with ThreadPoolExecutor(max_workers=self.cfg.max_in_flight) as pool:
            return list(pool.map(self.execute, queries))

    def count(self, q: StructuredQuery) -> int:
        table = self.execute(q)
        if not table.rows:
            return 0
        cell = table.rows[0][table.columns.index("count")]
        return int(cell.text)

    def _execute_http(self, q: StructuredQuery) -> ResultTable:
        text = render_sparql(q)
        attempt = 0
        while True:
            try:
                with self._gate:
                    resp = self._session.post(
                        self._url,
                        data={"query": text},
                        headers={"Accept": "application/sparql-results+json"},
                        timeout=self.cfg.request_timeout,
                    )
            except (requests.ConnectionError, requests.Timeout) as exc:
                attempt += 1
                if attempt >= self.cfg.retries:
                    raise TransportError(f"endpoint unreachable after {attempt} attempts: {exc}") from exc
                time.sleep(self.cfg.retry_base_delay * (2 ** (attempt - 1)))
                continue
            if resp.status_code // 100 != 2:
                raise EndpointError(
                    f"endpoint returned HTTP {resp.status_code}", status=resp.status_code
                )
            table = _decode_sparql_json(resp.content)
            # Mirror endpoint truncation defensively; remote may be laxer.
            table.rows = table.rows[: self.cfg.quota]
            return table


def open_endpoint(cfg: EndpointConfig) -> Gateway:
    return Gateway(cfg)
