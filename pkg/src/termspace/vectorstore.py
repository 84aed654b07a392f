"""Model persistence and the query algebra over term vectors.

The interchange format is the plain-text vectors file: a `<vocab> <dim>`
header line, then one `key v1 ... vdim` line per term, with an optional
meta.json carrying the config snapshot and per-term frequency/POS metadata.
Vectors imported without metadata stay queryable; POS and frequency filters
are then silently inactive.

All neighbour queries are exhaustive cosine scans over the vocabulary;
results order by descending similarity with lexicographic tie-break.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .embeddings import TermVectorModel, TrainingConfig, Vocabulary, VocabularyEntry, char_ngrams
from .errors import DataError, NotFoundError, UnknownTermError

VECTORS_FILE = "vectors.txt"
META_FILE = "meta.json"


@dataclass
class QueryFilter:
    pos: Optional[str] = None
    min_freq: Optional[int] = None
    exclude: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.min_freq is not None and self.min_freq < 0:
            raise DataError(f"min_freq must be >= 0, got {self.min_freq}")
        self.exclude = frozenset(self.exclude)


@dataclass(frozen=True)
class Neighbor:
    term: str
    similarity: float


def save_model(model: TermVectorModel, directory: Path | str) -> None:
    """Write vectors.txt (full float precision) and meta.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    keys = model.vocabulary.keys_by_id()
    with (directory / VECTORS_FILE).open("w", encoding="utf-8") as handle:
        handle.write(f"{len(keys)} {model.dim}\n")
        for key in keys:
            row = model.input_vectors[model.vocabulary.id_of(key)]
            handle.write(key + " " + " ".join(repr(float(x)) for x in row) + "\n")
    meta = {
        "created_at": datetime.now(timezone.utc).isoformat(),
        "dim": model.dim,
        "config": model.config.to_dict() if model.config else None,
        "vocabulary": {
            key: {
                "frequency": entry.frequency,
                "head_pos": entry.head_pos,
            }
            for key, entry in model.vocabulary.entries.items()
        },
        "epoch_losses": model.epoch_losses,
    }
    (directory / META_FILE).write_text(
        json.dumps(meta, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


def load_model(directory: Path | str) -> TermVectorModel:
    """Read a model directory, or a bare vectors file without metadata."""
    directory = Path(directory)
    vectors_path = directory / VECTORS_FILE if directory.is_dir() else directory
    if not vectors_path.is_file():
        raise NotFoundError(f"no vectors file at {vectors_path}")
    meta = None
    meta_path = vectors_path.parent / META_FILE
    if meta_path.is_file():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))

    with vectors_path.open("r", encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise DataError(f"{vectors_path.name}:1: malformed header {header!r}")
        try:
            size, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise DataError(f"{vectors_path.name}:1: malformed header {header!r}") from exc
        if size < 0 or dim < 1:
            raise DataError(f"{vectors_path.name}:1: malformed header {header!r}")
        matrix = np.zeros((size, dim), dtype=np.float64)
        entries: dict[str, VocabularyEntry] = {}
        for row, lineno in zip(range(size), range(2, size + 2)):
            parts = handle.readline().split()
            if len(parts) != dim + 1:
                raise DataError(
                    f"{vectors_path.name}:{lineno}: expected {dim} components, "
                    f"got {len(parts) - 1}"
                )
            key = parts[0]
            if key in entries:
                raise DataError(f"{vectors_path.name}:{lineno}: duplicate key {key!r}")
            matrix[row] = [float(x) for x in parts[1:]]
            frequency, head_pos = 0, None
            if meta and key in meta.get("vocabulary", {}):
                info = meta["vocabulary"][key]
                frequency = info.get("frequency", 0)
                head_pos = info.get("head_pos")
            entries[key] = VocabularyEntry(row, frequency, head_pos)
    if not np.all(np.isfinite(matrix)):
        raise DataError(f"{vectors_path.name}: non-finite vector component")

    config = None
    if meta and meta.get("config"):
        config = TrainingConfig(**meta["config"])
    return TermVectorModel(
        vocabulary=Vocabulary(entries),
        input_vectors=matrix,
        output_vectors=None,
        dim=dim,
        config=config,
        epoch_losses=(meta or {}).get("epoch_losses", []),
    )


def has_metadata(model: TermVectorModel) -> bool:
    """Filters are active only when any frequency/POS metadata survived loading."""
    return any(
        entry.frequency > 0 or entry.head_pos is not None
        for entry in model.vocabulary.entries.values()
    )


def _vector_of(model: TermVectorModel, key: str) -> np.ndarray:
    if key not in model.vocabulary:
        raise UnknownTermError(key)
    return model.input_vectors[model.vocabulary.id_of(key)]


def _checked_nonzero(vector: np.ndarray, label: str) -> np.ndarray:
    if not np.any(vector):
        raise DataError(f"zero vector for {label}")
    return vector


def similarity(model: TermVectorModel, a: str, b: str) -> float:
    """Cosine of the two stored vectors."""
    va = _checked_nonzero(_vector_of(model, a), a)
    vb = _checked_nonzero(_vector_of(model, b), b)
    return float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))


def neighbors(
    model: TermVectorModel,
    query: Union[str, np.ndarray],
    topn: int = 10,
    query_filter: Optional[QueryFilter] = None,
) -> list[Neighbor]:
    """Exhaustive scan for the nearest terms by cosine similarity."""
    query_filter = query_filter or QueryFilter()
    exclude = set(query_filter.exclude)
    if isinstance(query, str):
        vector = _checked_nonzero(_vector_of(model, query), query)
        exclude.add(query)
    else:
        vector = np.asarray(query, dtype=np.float64)
        if vector.shape != (model.dim,):
            raise DataError(f"query vector must have dim {model.dim}")
        _checked_nonzero(vector, "query")
    if topn <= 0:
        return []

    filters_active = has_metadata(model)
    norm_q = np.linalg.norm(vector)
    scored: list[tuple[float, str]] = []
    for key, entry in model.vocabulary.entries.items():
        if key in exclude:
            continue
        if filters_active and query_filter.pos is not None and entry.head_pos != query_filter.pos:
            continue
        if (
            filters_active
            and query_filter.min_freq is not None
            and entry.frequency < query_filter.min_freq
        ):
            continue
        row = model.input_vectors[entry.id]
        norm_row = np.linalg.norm(row)
        if norm_row == 0 or norm_q == 0:
            continue
        scored.append((float(np.dot(row, vector) / (norm_row * norm_q)), key))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [Neighbor(term, score) for score, term in scored[:topn]]


def analogy(
    model: TermVectorModel, y: str, a: str, b: str, topn: int = 10
) -> list[Neighbor]:
    """X related to y as a relates to b: rank by cosine to v(y) + v(a) - v(b)."""
    target = _vector_of(model, y) + _vector_of(model, a) - _vector_of(model, b)
    return neighbors(
        model, target, topn, QueryFilter(exclude=frozenset({y, a, b}))
    )


def centroid(
    model: TermVectorModel, positive: list[str], topn: int = 10
) -> tuple[np.ndarray, list[Neighbor]]:
    """Mean of the member vectors and its nearest non-member terms."""
    if not positive:
        raise DataError("centroid needs at least one term")
    vectors = [_vector_of(model, key) for key in positive]
    mean = np.mean(vectors, axis=0)
    found = neighbors(model, mean, topn, QueryFilter(exclude=frozenset(positive)))
    return mean, found


def oov_vector(
    model: TermVectorModel, word: str, minn: int = 3, maxn: int = 5
) -> Optional[np.ndarray]:
    """Out-of-vocabulary aid: mean of n-gram vectors, each n-gram vector being
    the mean of the vectors of vocabulary terms containing that n-gram."""
    grams = char_ngrams(word, minn, maxn)
    index: dict[str, list[int]] = {}
    for key, entry in model.vocabulary.entries.items():
        for gram in set(char_ngrams(key, minn, maxn)):
            index.setdefault(gram, []).append(entry.id)
    gram_vectors = []
    for gram in grams:
        rows = index.get(gram)
        if rows:
            gram_vectors.append(model.input_vectors[rows].mean(axis=0))
    if not gram_vectors:
        return None
    return np.mean(gram_vectors, axis=0)
