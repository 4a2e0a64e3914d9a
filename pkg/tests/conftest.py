from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

from fixturegen import comics_scenario  # noqa: E402

FOUR_BOOKS = TESTS_DIR / "fixtures" / "four_books.nt"
BOOK_CLASS = "http://example.org/Book"


@pytest.fixture(scope="session")
def four_books_path() -> Path:
    return FOUR_BOOKS


@pytest.fixture(scope="session")
def scenario_path(tmp_path_factory) -> Path:
    target = tmp_path_factory.mktemp("scenario") / "comics_scenario.nt"
    target.write_text(comics_scenario(), encoding="utf-8")
    return target


@pytest.fixture(autouse=True)
def _no_endpoint_override(monkeypatch):
    monkeypatch.delenv("MISSINGPATH_ENDPOINT", raising=False)
