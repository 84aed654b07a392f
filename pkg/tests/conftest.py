from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from termspace.lexicon import load_lexicon_dir
from termspace.termex import annotate_corpus
from termspace.textcore import Corpus, Document

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
LEXICON_DIR = FIXTURES / "lexicon"
CORPUS_DIR = FIXTURES / "corpus"
GOLD_DIR = FIXTURES / "gold"


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon_dir(LEXICON_DIR)


@pytest.fixture(scope="session")
def fixture_corpus() -> Corpus:
    documents = [
        Document(path.stem, str(path), path.read_text(encoding="utf-8"))
        for path in sorted(CORPUS_DIR.glob("*.txt"))
    ]
    return Corpus(id="fixture", documents=documents)


@pytest.fixture(scope="session")
def annotated(lexicon, fixture_corpus):
    return annotate_corpus(fixture_corpus, lexicon)


def gold_lines(name: str) -> list[str]:
    lines = []
    for raw in (GOLD_DIR / name).read_text(encoding="utf-8").splitlines():
        if raw.strip() and not raw.lstrip().startswith("#"):
            lines.append(raw)
    return lines
