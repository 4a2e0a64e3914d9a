"""In-memory triple store backed by N-Triples files.

The store answers exactly the structured query vocabulary used by the
engine -- it is not a SPARQL evaluator. Keeping the offline path behind
the same query surface as the remote one makes quota handling and all
downstream stages testable without a network.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import FixtureParseError, ValidationError
from .terms import RDF_TYPE, Term, literal, uri

_IRIREF = re.compile(r"<([^<>\"{}|^`\\\x00-\x20]*)>")
_LITERAL = re.compile(r'"((?:[^"\\]|\\.)*)"(?:\^\^<([^<>]*)>|@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*))?')
_UNESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _unescape(raw: str, line_no: int) -> str:
    if "\\" not in raw:
        return raw
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(raw):
            raise FixtureParseError("dangling escape in literal", line_no)
        esc = raw[i + 1]
        if esc in _UNESCAPES:
            out.append(_UNESCAPES[esc])
            i += 2
        elif esc == "u":
            out.append(chr(int(raw[i + 2 : i + 6], 16)))
            i += 6
        elif esc == "U":
            out.append(chr(int(raw[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise FixtureParseError(f"unknown escape \\{esc}", line_no)
    return "".join(out)


def _parse_line(line: str, line_no: int) -> tuple[str, str, Term] | None:
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _IRIREF.match(stripped)
    if m is None:
        raise FixtureParseError("expected subject IRI", line_no)
    subject = m.group(1)
    rest = stripped[m.end() :].lstrip()
    m = _IRIREF.match(rest)
    if m is None:
        raise FixtureParseError("expected predicate IRI", line_no)
    predicate = m.group(1)
    rest = rest[m.end() :].lstrip()
    if rest.startswith("<"):
        m = _IRIREF.match(rest)
        if m is None:
            raise FixtureParseError("malformed object IRI", line_no)
        obj = uri(m.group(1))
        rest = rest[m.end() :]
    elif rest.startswith('"'):
        m = _LITERAL.match(rest)
        if m is None:
            raise FixtureParseError("malformed literal", line_no)
        text = _unescape(m.group(1), line_no)
        obj = literal(text, datatype=m.group(2), lang=m.group(3))
        rest = rest[m.end() :]
    else:
        raise FixtureParseError("expected object IRI or literal", line_no)
    if rest.strip() != ".":
        raise FixtureParseError("expected terminating '.'", line_no)
    return subject, predicate, obj


class FixtureStore:
    """Triples indexed by subject and predicate, with set semantics."""

    def __init__(self) -> None:
        # subject -> predicate -> ordered unique objects
        self._spo: dict[str, dict[str, list[Term]]] = {}
        self._seen: set[tuple[str, str, Term]] = set()
        self.triple_count = 0

    def add(self, subject: str, predicate: str, obj: Term) -> None:
        key = (subject, predicate, obj)
        if key in self._seen:
            return
        self._seen.add(key)
        self._spo.setdefault(subject, {}).setdefault(predicate, []).append(obj)
        self.triple_count += 1

    # -- low-level accessors -------------------------------------------------

    def objects(self, subject: str, predicate: str) -> list[Term]:
        return self._spo.get(subject, {}).get(predicate, [])

    def predicates(self, subject: str) -> list[str]:
        return list(self._spo.get(subject, {}).keys())

    def instances_of(self, class_uri: str) -> list[str]:
        """Subjects typed ``class_uri``, sorted for deterministic results."""
        found = [
            s
            for s, po in self._spo.items()
            if any(o.is_uri and o.text == class_uri for o in po.get(RDF_TYPE, []))
        ]
        found.sort()
        return found

    def terminals(self, subject: str, path: list[str]) -> list[Term]:
        """All terminal values reachable from ``subject`` along ``path``.

        A zero-length path terminates at the subject itself. Duplicate
        terminals from multiple instantiations of the chain are kept once.
        """
        if not path:
            return [uri(subject)]
        frontier = [uri(subject)]
        for predicate in path:
            nxt: list[Term] = []
            seen: set[Term] = set()
            for node in frontier:
                if not node.is_uri:
                    continue
                for obj in self.objects(node.text, predicate):
                    if obj not in seen:
                        seen.add(obj)
                        nxt.append(obj)
            frontier = nxt
            if not frontier:
                break
        return frontier

    def has_path(self, subject: str, path: list[str]) -> bool:
        return bool(self.terminals(subject, path))


def load_fixture(path: str | Path) -> FixtureStore:
    """Parse an N-Triples file into a :class:`FixtureStore`.

    Raises :class:`FixtureParseError` carrying the offending line number.
    """
    store = FixtureStore()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parsed = _parse_line(line, line_no)
            if parsed is not None:
                store.add(*parsed)
    return store


def parse_ntriples(text: str) -> FixtureStore:
    store = FixtureStore()
    for line_no, line in enumerate(text.splitlines(), start=1):
        parsed = _parse_line(line, line_no)
        if parsed is not None:
            store.add(*parsed)
    return store


def evaluate(store: FixtureStore, query, quota: int) -> tuple[list[str], list[tuple]]:
    """Evaluate a structured query against the store.

    Returns ``(columns, rows)``; rows are truncated at ``quota`` exactly like
    a remote endpoint would truncate its result set.
    """
    from .gateway import QueryKind  # local import to avoid a cycle

    instances = store.instances_of(query.class_uri)
    kind = query.kind
    rows: list[tuple]

    if kind is QueryKind.COUNT_ALL_ENTITIES:
        columns = ["count"]
        rows = [(literal(str(len(instances))),)]
    elif kind is QueryKind.COUNT_ENTITIES_WITH_PATH:
        columns = ["count"]
        n = sum(1 for e in instances if store.has_path(e, query.path))
        rows = [(literal(str(n)),)]
    elif kind is QueryKind.DISTINCT_PREDICATES_AT_DEPTH:
        columns = ["p"]
        preds: set[str] = set()
        for e in instances:
            for node in store.terminals(e, query.path):
                if node.is_uri:
                    preds.update(store.predicates(node.text))
        preds.discard(RDF_TYPE)
        rows = [(uri(p),) for p in sorted(preds)]
    elif kind is QueryKind.VALUE_HISTOGRAM_AT_PATH:
        columns = ["value", "count"]
        counts: dict[Term, int] = {}
        for e in instances:
            for term in store.terminals(e, query.path):
                bare = Term(term.text, term.is_uri, term.datatype, term.lang)
                counts[bare] = counts.get(bare, 0) + 1
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].sort_key()))
        rows = [(term, literal(str(n))) for term, n in ordered]
    elif kind is QueryKind.ENTITIES_WITH_VALUE_AT_PATH:
        if not query.path or query.value is None:
            raise ValidationError("EntitiesWithValueAtPath requires a path and a value")
        columns = ["e"]
        rows = [
            (uri(e),)
            for e in instances
            if any(_terms_equal(t, query.value) for t in store.terminals(e, query.path))
        ]
    elif kind is QueryKind.ENTITIES_WITHOUT_PATH:
        columns = ["e"]
        rows = [(uri(e),) for e in instances if not store.has_path(e, query.path)]
    elif kind is QueryKind.TERMINAL_VALUES_FOR_ALL_ENTITIES:
        columns = ["e", "value", "datatype", "language"]
        rows = []
        for e in instances:
            for term in store.terminals(e, query.path):
                datatype = None if term.is_uri else term.datatype
                lang = None if term.is_uri else term.lang
                rows.append(
                    (
                        uri(e),
                        term,
                        uri(datatype) if datatype else None,
                        literal(lang) if lang else None,
                    )
                )
    else:  # pragma: no cover - exhaustive over QueryKind
        raise ValidationError(f"unsupported query kind {kind}")

    if query.limit is not None:
        rows = rows[: query.limit]
    return columns, rows[:quota]


def _terms_equal(a: Term, b: Term) -> bool:
    if a.is_uri != b.is_uri:
        return False
    if a.is_uri:
        return a.text == b.text
    return a.text == b.text and a.datatype == b.datatype and a.lang == b.lang
