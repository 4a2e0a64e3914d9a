"""RDF term model and URI prefix handling shared across the engine."""

from __future__ import annotations

from dataclasses import dataclass

XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

# Well-known namespaces used to compact URIs into display labels.
PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "skos": "http://www.w3.org/2004/02/skos/core#",
    "schema": "http://schema.org/",
    "wd": "http://www.wikidata.org/entity/",
    "wdt": "http://www.wikidata.org/prop/direct/",
    "wikibase": "http://wikiba.se/ontology#",
    "ex": "http://example.org/",
}

_SORTED_PREFIXES = sorted(PREFIXES.items(), key=lambda kv: -len(kv[1]))


@dataclass(frozen=True)
class Term:
    """A URI or literal cell value.

    ``datatype`` and ``lang`` are only set when the data expresses them;
    plain strings carry neither.
    """

    text: str
    is_uri: bool = False
    datatype: str | None = None
    lang: str | None = None

    def sort_key(self) -> tuple:
        return (0 if self.is_uri else 1, self.text, self.datatype or "", self.lang or "")

    def __str__(self) -> str:
        return self.text


def uri(text: str) -> Term:
    return Term(text, is_uri=True)


def literal(text: str, datatype: str | None = None, lang: str | None = None) -> Term:
    return Term(text, is_uri=False, datatype=datatype, lang=lang)


def compact(uri_text: str) -> str:
    """Compact a URI with a known namespace prefix, else return it unchanged."""
    for prefix, ns in _SORTED_PREFIXES:
        if uri_text.startswith(ns) and len(uri_text) > len(ns):
            return f"{prefix}:{uri_text[len(ns):]}"
    return uri_text


def uri_tail(uri_text: str) -> str:
    """Last path segment of a URI, used as a label fallback."""
    for sep in ("#", "/"):
        if sep in uri_text:
            tail = uri_text.rsplit(sep, 1)[1]
            if tail:
                return tail
    return uri_text


def path_label(predicates: list[str] | tuple[str, ...]) -> str:
    """Display label for a predicate chain: prefixed URIs joined by '/'."""
    return "/".join(compact(p) for p in predicates)
