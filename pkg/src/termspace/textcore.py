"""Corpus ingestion, tokenization and sentence splitting.

Tokenization is non-destructive: every token records the half-open character
span it came from, so concatenating surfaces and gaps reproduces the input.
Word tokens are runs of Unicode letters joined by internal hyphens or
apostrophes (East-Slavic orthography needs both). Number tokens are digit
runs with an optional internal decimal point or comma. Any other
non-whitespace character becomes a one-character punct or symbol token.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import DataError, DuplicateIdError, NotFoundError

WORD = "word"
NUMBER = "number"
PUNCT = "punct"
SYMBOL = "symbol"

SENTENCE_TERMINATORS = {".", "!", "?"}
# Punctuation that may trail a terminator inside the same sentence.
_TERMINATOR_TAIL = SENTENCE_TERMINATORS | {'"', "'", ")", "]", "»", "…"}

STATUS_NOT_ANNOTATED = "not_annotated"
STATUS_ANNOTATED = "annotated"


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int
    kind: str

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass
class Sentence:
    doc_id: str
    index: int
    tokens: list[Token]


@dataclass
class Document:
    id: str
    source: str
    text: str


@dataclass
class Corpus:
    id: str
    documents: list[Document]
    created_at: str = ""
    status: str = STATUS_NOT_ANNOTATED

    def document_ids(self) -> list[str]:
        return [d.id for d in self.documents]


def _is_word_char(ch: str) -> bool:
    return ch.isalpha()


def tokenize(text: str) -> list[Token]:
    """Split text into word/number/punct/symbol tokens with exact spans."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if _is_word_char(ch):
            i += 1
            while i < n:
                if _is_word_char(text[i]):
                    i += 1
                elif text[i] in "-'" and i + 1 < n and _is_word_char(text[i + 1]):
                    i += 2
                else:
                    break
            tokens.append(Token(text[start:i], start, i, WORD))
        elif ch.isdigit():
            i += 1
            while i < n:
                if text[i].isdigit():
                    i += 1
                elif text[i] in ".," and i + 1 < n and text[i + 1].isdigit():
                    i += 2
                else:
                    break
            tokens.append(Token(text[start:i], start, i, NUMBER))
        else:
            kind = PUNCT if unicodedata.category(ch).startswith("P") else SYMBOL
            tokens.append(Token(ch, start, start + 1, kind))
            i += 1
    return tokens


def split_sentences(
    tokens: list[Token], abbreviations: set[str], doc_id: str = ""
) -> list[Sentence]:
    """Group tokens into sentences at . ! ? boundaries.

    A terminator does not end the sentence when the token right before it is
    a word on the abbreviation list. Trailing quote/bracket/terminator
    punctuation is kept with the sentence it closes.
    """
    sentences: list[Sentence] = []
    current: list[Token] = []
    i = 0
    n = len(tokens)
    while i < n:
        token = tokens[i]
        current.append(token)
        i += 1
        if token.kind != PUNCT or token.surface not in SENTENCE_TERMINATORS:
            continue
        prev = current[-2] if len(current) >= 2 else None
        if prev is not None and prev.kind == WORD and prev.surface.lower() in abbreviations:
            continue
        while i < n and tokens[i].kind == PUNCT and tokens[i].surface in _TERMINATOR_TAIL:
            current.append(tokens[i])
            i += 1
        sentences.append(Sentence(doc_id, len(sentences), current))
        current = []
    if current:
        sentences.append(Sentence(doc_id, len(sentences), current))
    return sentences


class CorpusRepository:
    """Filesystem store: corpora/<id>/manifest.json + corpora/<id>/docs/<doc-id>.txt."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def corpus_dir(self, corpus_id: str) -> Path:
        return self.root / "corpora" / corpus_id

    def exists(self, corpus_id: str) -> bool:
        return (self.corpus_dir(corpus_id) / "manifest.json").is_file()

    def list_ids(self) -> list[str]:
        base = self.root / "corpora"
        if not base.is_dir():
            return []
        return sorted(p.name for p in base.iterdir() if (p / "manifest.json").is_file())

    def save(self, corpus: Corpus) -> None:
        directory = self.corpus_dir(corpus.id)
        docs_dir = directory / "docs"
        docs_dir.mkdir(parents=True, exist_ok=True)
        for doc in corpus.documents:
            (docs_dir / f"{doc.id}.txt").write_text(doc.text, encoding="utf-8")
        manifest = {
            "id": corpus.id,
            "created_at": corpus.created_at,
            "status": corpus.status,
            "documents": [
                {"id": d.id, "source": d.source, "bytes": len(d.text.encode("utf-8"))}
                for d in corpus.documents
            ],
        }
        (directory / "manifest.json").write_text(
            json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    def load_manifest(self, corpus_id: str) -> dict:
        path = self.corpus_dir(corpus_id) / "manifest.json"
        if not path.is_file():
            raise NotFoundError(f"unknown corpus id: {corpus_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def load(self, corpus_id: str) -> Corpus:
        manifest = self.load_manifest(corpus_id)
        docs = []
        for entry in manifest["documents"]:
            text = (self.corpus_dir(corpus_id) / "docs" / f"{entry['id']}.txt").read_text(
                encoding="utf-8"
            )
            docs.append(Document(entry["id"], entry.get("source", ""), text))
        return Corpus(
            id=manifest["id"],
            documents=docs,
            created_at=manifest.get("created_at", ""),
            status=manifest.get("status", STATUS_NOT_ANNOTATED),
        )

    def set_status(self, corpus_id: str, status: str) -> None:
        manifest = self.load_manifest(corpus_id)
        manifest["status"] = status
        (self.corpus_dir(corpus_id) / "manifest.json").write_text(
            json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )


def _unique_doc_id(base: str, taken: set[str]) -> str:
    doc_id = base
    suffix = 2
    while doc_id in taken:
        doc_id = f"{base}-{suffix}"
        suffix += 1
    taken.add(doc_id)
    return doc_id


def ingest(
    paths: list[Path | str], corpus_id: str, repository: CorpusRepository
) -> Corpus:
    """Create one Document per input file and persist the corpus."""
    if not paths:
        raise DataError("no input documents")
    if repository.exists(corpus_id):
        raise DuplicateIdError(f"duplicate corpus id: {corpus_id!r}")
    documents = []
    taken: set[str] = set()
    for path in paths:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"{path}: not valid UTF-8: {exc}") from exc
        documents.append(Document(_unique_doc_id(path.stem, taken), str(path), text))
    corpus = Corpus(
        id=corpus_id,
        documents=documents,
        created_at=datetime.now(timezone.utc).isoformat(),
        status=STATUS_NOT_ANNOTATED,
    )
    repository.save(corpus)
    return corpus


def make_corpus(
    texts: list[tuple[str, str, str]], corpus_id: str, repository: CorpusRepository | None = None
) -> Corpus:
    """Build a corpus from (doc_id, source, text) triples; persist when given a repository."""
    if not texts:
        raise DataError("no input documents")
    if repository is not None and repository.exists(corpus_id):
        raise DuplicateIdError(f"duplicate corpus id: {corpus_id!r}")
    taken: set[str] = set()
    documents = [
        Document(_unique_doc_id(doc_id, taken), source, text) for doc_id, source, text in texts
    ]
    corpus = Corpus(
        id=corpus_id,
        documents=documents,
        created_at=datetime.now(timezone.utc).isoformat(),
        status=STATUS_NOT_ANNOTATED,
    )
    if repository is not None:
        repository.save(corpus)
    return corpus
