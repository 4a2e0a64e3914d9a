"""Independent brute-force oracles used to pin expected values.

Everything here is deliberately written against raw triple lists with
its own tiny parser and naive traversals, so the oracles share no code
with the engine they check.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_TRIPLE = re.compile(
    r"^<([^>]*)>\s+<([^>]*)>\s+(?:<([^>]*)>|\"((?:[^\"\\]|\\.)*)\""
    r"(?:\^\^<([^>]*)>|@([A-Za-z][A-Za-z0-9-]*))?)\s*\.\s*$"
)


def parse_triples(text: str):
    """(subject, predicate, object) with object = ('uri', u) or
    ('lit', text, datatype, lang); duplicates removed."""
    triples = []
    seen = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = _TRIPLE.match(line)
        assert m, f"oracle parser rejected line: {line!r}"
        s, p, obj_uri, lit, datatype, lang = m.groups()
        if obj_uri is not None:
            obj = ("uri", obj_uri)
        else:
            obj = ("lit", _unescape(lit), datatype, lang)
        triple = (s, p, obj)
        if triple not in seen:
            seen.add(triple)
            triples.append(triple)
    return triples


def _unescape(raw: str) -> str:
    return (
        raw.replace("\\n", "\n")
        .replace("\\t", "\t")
        .replace('\\"', '"')
        .replace("\\\\", "\\")
    )


def load_triples(path: str | Path):
    return parse_triples(Path(path).read_text(encoding="utf-8"))


def instances(triples, class_uri: str) -> list[str]:
    found = {s for s, p, o in triples if p == RDF_TYPE and o == ("uri", class_uri)}
    return sorted(found)


def terminals(triples, subject: str, path: tuple[str, ...]):
    """All distinct terminal objects reachable along the chain."""
    frontier = [("uri", subject)]
    for predicate in path:
        nxt = []
        for node in frontier:
            if node[0] != "uri":
                continue
            for s, p, o in triples:
                if s == node[1] and p == predicate and o not in nxt:
                    nxt.append(o)
        frontier = nxt
    return frontier


def has_path(triples, subject: str, path: tuple[str, ...]) -> bool:
    return bool(terminals(triples, subject, path))


def enumerate_chains(triples, class_uri: str, max_depth: int):
    """All predicate chains (up to depth) with their covered entity counts,
    by exhaustive traversal from every instance."""
    insts = instances(triples, class_uri)
    chains: dict[tuple[str, ...], set[str]] = {}

    def walk(entity: str, node, prefix: tuple[str, ...]):
        if len(prefix) >= max_depth or node[0] != "uri":
            return
        for s, p, o in triples:
            if s != node[1] or p == RDF_TYPE:
                continue
            chain = prefix + (p,)
            chains.setdefault(chain, set()).add(entity)
            walk(entity, o, chain)

    for entity in insts:
        walk(entity, ("uri", entity), ())
    return {chain: len(covered) for chain, covered in chains.items()}, len(insts)


def value_histogram(triples, class_uri: str, path: tuple[str, ...]):
    """value -> number of entities reaching it (an entity counts once)."""
    counts: dict[tuple, int] = {}
    for entity in instances(triples, class_uri):
        for term in terminals(triples, entity, path):
            counts[term] = counts.get(term, 0) + 1
    return counts


def entities_with_value(triples, class_uri: str, path, value) -> list[str]:
    return [
        e for e in instances(triples, class_uri) if value in terminals(triples, e, path)
    ]


def entities_without_path(triples, class_uri: str, path) -> list[str]:
    return [e for e in instances(triples, class_uri) if not has_path(triples, e, path)]


def russel_rao_brute(u, v) -> float:
    assert len(u) == len(v)
    n = len(u)
    c_tt = 0
    for a, b in zip(u, v):
        if a == 1 and b == 1:
            c_tt += 1
    return (n - c_tt) / n


def ks_reference(a, b):
    """Reference two-sample KS: loop-based ECDF sup plus a direct series
    evaluation of the limiting distribution at sqrt(mn/(m+n)) * D."""
    points = sorted(set(list(a) + list(b)))
    d = 0.0
    for x in points:
        ecdf_a = sum(1 for v in a if v <= x) / len(a)
        ecdf_b = sum(1 for v in b if v <= x) / len(b)
        d = max(d, abs(ecdf_a - ecdf_b))
    lam = math.sqrt(len(a) * len(b) / (len(a) + len(b))) * d
    if lam <= 0:
        return d, 1.0
    total = 0.0
    for j in range(1, 2000):
        term = (-1) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) < 1e-18:
            break
    return d, min(max(2.0 * total, 0.0), 1.0)
