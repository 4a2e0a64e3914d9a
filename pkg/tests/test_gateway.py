"""Endpoint gateway: rendering, fixture evaluation, HTTP protocol, quota."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs

import pytest

import oracles
from missingpath.errors import (
    EndpointError,
    FixtureParseError,
    TransportError,
    ValidationError,
)
from missingpath.fixture import load_fixture, parse_ntriples
from missingpath.gateway import (
    EndpointConfig,
    Gateway,
    QueryKind,
    StructuredQuery,
    render_sparql,
)
from missingpath.terms import literal, uri

BOOK = "http://example.org/Book"
EX = "http://example.org/"

GENRE_FIXTURE = """
<http://example.org/b1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Book> .
<http://example.org/b1> <http://example.org/genre> <http://example.org/g1> .
<http://example.org/b2> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Book> .
<http://example.org/b2> <http://example.org/genre> <http://example.org/g1> .
<http://example.org/b3> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Book> .
<http://example.org/b3> <http://example.org/genre> <http://example.org/g1> .
<http://example.org/b4> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/Book> .
<http://example.org/b4> <http://example.org/genre> <http://example.org/g2> .
"""


def gateway_for(path, quota=10000) -> Gateway:
    return Gateway(EndpointConfig(base_url=str(path), quota=quota))


class TestRenderSparql:
    def test_distinct_predicates_depth_one(self):
        q = StructuredQuery(QueryKind.DISTINCT_PREDICATES_AT_DEPTH, BOOK, path=())
        text = render_sparql(q)
        assert f"?e a <{BOOK}>" in text
        assert "SELECT DISTINCT ?p" in text
        assert "?e ?p ?o" in text

    def test_count_entities_renders_property_chain(self):
        q = StructuredQuery(
            QueryKind.COUNT_ENTITIES_WITH_PATH, BOOK,
            path=(EX + "author", EX + "name"),
        )
        text = render_sparql(q)
        assert f"?e <{EX}author> ?v1" in text
        assert f"?v1 <{EX}name> ?v2" in text

    def test_entities_without_path_uses_negation(self):
        q = StructuredQuery(QueryKind.ENTITIES_WITHOUT_PATH, BOOK, path=(EX + "title",))
        text = render_sparql(q)
        assert "FILTER NOT EXISTS" in text
        assert f"?e <{EX}title> ?v1" in text

    def test_terminal_values_projects_descriptors(self):
        q = StructuredQuery(
            QueryKind.TERMINAL_VALUES_FOR_ALL_ENTITIES, BOOK, path=(EX + "title",)
        )
        text = render_sparql(q)
        assert "DATATYPE(?value)" in text
        assert "LANG(?value)" in text

    def test_histogram_orders_by_count_descending(self):
        q = StructuredQuery(QueryKind.VALUE_HISTOGRAM_AT_PATH, BOOK, path=(EX + "genre",))
        assert "ORDER BY DESC(?count)" in render_sparql(q)

    def test_rendering_is_deterministic(self):
        q = StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK)
        assert render_sparql(q) == render_sparql(q)

    def test_malformed_uri_rejected(self):
        with pytest.raises(ValidationError):
            StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, "not a uri with spaces")

    def test_value_query_requires_path_and_value(self):
        with pytest.raises(ValidationError):
            StructuredQuery(QueryKind.ENTITIES_WITH_VALUE_AT_PATH, BOOK, path=())

    def test_depth_limit_enforced(self):
        with pytest.raises(ValidationError):
            StructuredQuery(
                QueryKind.COUNT_ALL_ENTITIES, BOOK, path=tuple(EX + f"p{i}" for i in range(9))
            )


class TestFixtureStore:
    def test_empty_fixture(self, tmp_path):
        target = tmp_path / "empty.nt"
        target.write_text("", encoding="utf-8")
        store = load_fixture(target)
        assert store.triple_count == 0

    def test_duplicate_triple_kept_once(self):
        line = f"<{EX}b1> <{EX}title> \"One\" .\n"
        store = parse_ntriples(line + line)
        assert store.triple_count == 1

    def test_parse_error_carries_line_number(self, tmp_path):
        target = tmp_path / "bad.nt"
        target.write_text(
            f"<{EX}b1> <{EX}title> \"One\" .\nthis is not a triple\n", encoding="utf-8"
        )
        with pytest.raises(FixtureParseError) as err:
            load_fixture(target)
        assert err.value.line == 2

    def test_literal_escapes_and_tags(self):
        store = parse_ntriples(
            f'<{EX}b1> <{EX}title> "say \\"hi\\"\\n"@en .\n'
            f'<{EX}b1> <{EX}date> "1998"^^<http://www.w3.org/2001/XMLSchema#gYear> .\n'
        )
        title = store.objects(EX + "b1", EX + "title")[0]
        assert title.text == 'say "hi"\n'
        assert title.lang == "en"
        date = store.objects(EX + "b1", EX + "date")[0]
        assert date.datatype == "http://www.w3.org/2001/XMLSchema#gYear"

    def test_count_all_on_four_books(self, four_books_path):
        gw = gateway_for(four_books_path)
        assert gw.count(StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK)) == 4

    def test_genre_histogram(self, tmp_path):
        target = tmp_path / "genres.nt"
        target.write_text(GENRE_FIXTURE, encoding="utf-8")
        gw = gateway_for(target)
        table = gw.execute(
            StructuredQuery(QueryKind.VALUE_HISTOGRAM_AT_PATH, BOOK, path=(EX + "genre",))
        )
        rows = [(value.text, int(count.text)) for value, count in table.rows]
        assert rows == [(EX + "g1", 3), (EX + "g2", 1)]

    def test_empty_store_returns_zero_rows(self, tmp_path):
        target = tmp_path / "empty.nt"
        target.write_text("", encoding="utf-8")
        gw = gateway_for(target)
        for kind in QueryKind:
            if kind is QueryKind.ENTITIES_WITH_VALUE_AT_PATH:
                q = StructuredQuery(kind, BOOK, path=(EX + "p",), value=uri(EX + "v"))
            else:
                q = StructuredQuery(kind, BOOK, path=(EX + "p",))
            table = gw.execute(q)
            if kind in (QueryKind.COUNT_ALL_ENTITIES, QueryKind.COUNT_ENTITIES_WITH_PATH):
                assert int(table.rows[0][0].text) == 0
            else:
                assert len(table) == 0

    def test_quota_truncates_fixture_results(self, four_books_path):
        gw = gateway_for(four_books_path, quota=2)
        table = gw.execute(
            StructuredQuery(QueryKind.TERMINAL_VALUES_FOR_ALL_ENTITIES, BOOK, path=())
        )
        assert len(table) == 2

    def test_limit_applies_before_quota(self, four_books_path):
        gw = gateway_for(four_books_path)
        table = gw.execute(
            StructuredQuery(
                QueryKind.TERMINAL_VALUES_FOR_ALL_ENTITIES, BOOK, path=(), limit=3
            )
        )
        assert len(table) == 3

    def test_fixture_matches_bruteforce_on_every_kind(self, scenario_path):
        triples = oracles.load_triples(scenario_path)
        class_uri = "http://www.wikidata.org/entity/Q1004"
        p179 = "http://www.wikidata.org/prop/direct/P179"
        gw = gateway_for(scenario_path)

        count = gw.count(StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, class_uri))
        assert count == len(oracles.instances(triples, class_uri))

        with_path = gw.count(
            StructuredQuery(QueryKind.COUNT_ENTITIES_WITH_PATH, class_uri, path=(p179,))
        )
        covered = sum(
            1
            for e in oracles.instances(triples, class_uri)
            if oracles.has_path(triples, e, (p179,))
        )
        assert with_path == covered

        histogram = gw.execute(
            StructuredQuery(QueryKind.VALUE_HISTOGRAM_AT_PATH, class_uri, path=(p179,))
        )
        oracle_hist = oracles.value_histogram(triples, class_uri, (p179,))
        got = {value.text: int(count.text) for value, count in histogram.rows}
        assert got == {term[1]: n for term, n in oracle_hist.items()}

        spirou = uri("http://www.wikidata.org/entity/Q1130014")
        with_value = gw.execute(
            StructuredQuery(
                QueryKind.ENTITIES_WITH_VALUE_AT_PATH, class_uri, path=(p179,), value=spirou
            )
        )
        assert sorted(e.text for (e,) in with_value.rows) == sorted(
            oracles.entities_with_value(triples, class_uri, (p179,), ("uri", spirou.text))
        )

        without = gw.execute(
            StructuredQuery(QueryKind.ENTITIES_WITHOUT_PATH, class_uri, path=(p179,))
        )
        assert sorted(e.text for (e,) in without.rows) == sorted(
            oracles.entities_without_path(triples, class_uri, (p179,))
        )


class _SparqlHandler(BaseHTTPRequestHandler):
    """Minimal SPARQL-protocol endpoint backed by the brute-force oracle."""

    failures_left = 0
    triples = []
    class_uri = ""
    quota = 10000

    def log_message(self, *args):  # noqa: D102 - silence test server
        pass

    def do_POST(self):
        if type(self).failures_left > 0:
            type(self).failures_left -= 1
            self.close_connection = True
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length).decode()
        query = parse_qs(body)["query"][0]
        doc = self._answer(query)
        payload = json.dumps(doc).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/sparql-results+json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _answer(self, query: str) -> dict:
        triples, class_uri = type(self).triples, type(self).class_uri
        if "COUNT(DISTINCT ?e)" in query and "FILTER" not in query and "?v1" not in query:
            n = len(oracles.instances(triples, class_uri))
            return _results(["count"], [[_lit_cell(str(n))]])
        if "SELECT DISTINCT ?p" in query:
            preds = set()
            for e in oracles.instances(triples, class_uri):
                for s, p, o in triples:
                    if s == e and p != oracles.RDF_TYPE:
                        preds.add(p)
            return _results(["p"], [[_uri_cell(p)] for p in sorted(preds)])
        raise AssertionError(f"mock endpoint got unexpected query: {query}")


def _uri_cell(value):
    return {"type": "uri", "value": value}


def _lit_cell(value):
    return {"type": "literal", "value": value}


def _results(columns, rows):
    return {
        "head": {"vars": columns},
        "results": {
            "bindings": [
                {c: cell for c, cell in zip(columns, row) if cell is not None}
                for row in rows
            ]
        },
    }


@pytest.fixture()
def mock_endpoint(four_books_path):
    _SparqlHandler.triples = oracles.load_triples(four_books_path)
    _SparqlHandler.class_uri = BOOK
    _SparqlHandler.failures_left = 0
    server = ThreadingHTTPServer(("127.0.0.1", 0), _SparqlHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/sparql"
    server.shutdown()


class TestHttpGateway:
    def test_remote_matches_fixture(self, mock_endpoint, four_books_path):
        remote = Gateway(EndpointConfig(base_url=mock_endpoint, retry_base_delay=0.01))
        local = gateway_for(four_books_path)
        q = StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK)
        assert remote.count(q) == local.count(q) == 4
        q2 = StructuredQuery(QueryKind.DISTINCT_PREDICATES_AT_DEPTH, BOOK, path=())
        remote_preds = sorted(p.text for (p,) in remote.execute(q2).rows)
        local_preds = sorted(p.text for (p,) in local.execute(q2).rows)
        assert remote_preds == local_preds

    def test_transport_errors_retry_then_succeed(self, mock_endpoint):
        _SparqlHandler.failures_left = 2
        gw = Gateway(EndpointConfig(base_url=mock_endpoint, retries=3, retry_base_delay=0.01))
        assert gw.count(StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK)) == 4

    def test_transport_errors_exhaust_retries(self, mock_endpoint):
        _SparqlHandler.failures_left = 99
        gw = Gateway(EndpointConfig(base_url=mock_endpoint, retries=2, retry_base_delay=0.01))
        with pytest.raises(TransportError):
            gw.count(StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK))

    def test_http_error_status_surfaces(self):
        class _Failing(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                self.send_response(500)
                self.send_header("Content-Length", "0")
                self.end_headers()

        server = ThreadingHTTPServer(("127.0.0.1", 0), _Failing)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        try:
            gw = Gateway(
                EndpointConfig(
                    base_url=f"http://127.0.0.1:{server.server_address[1]}/",
                    retry_base_delay=0.01,
                )
            )
            with pytest.raises(EndpointError) as err:
                gw.count(StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK))
            assert err.value.status == 500
        finally:
            server.shutdown()

    def test_env_var_overrides_base_url(self, monkeypatch, mock_endpoint):
        monkeypatch.setenv("MISSINGPATH_ENDPOINT", mock_endpoint)
        gw = Gateway(EndpointConfig(base_url="/nonexistent/fixture.nt"))
        assert gw.is_remote
        assert gw.count(StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK)) == 4

    def test_malformed_results_document(self):
        class _Garbage(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                payload = b"this is not json"
                self.send_response(200)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        server = ThreadingHTTPServer(("127.0.0.1", 0), _Garbage)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        try:
            from missingpath.errors import DecodeError

            gw = Gateway(
                EndpointConfig(base_url=f"http://127.0.0.1:{server.server_address[1]}/")
            )
            with pytest.raises(DecodeError):
                gw.count(StructuredQuery(QueryKind.COUNT_ALL_ENTITIES, BOOK))
        finally:
            server.shutdown()
