"""Dictionaries that drive the syntactic-semantic analyzer.

Four TSV dictionaries (stems, inflexions, determinants, correlators) plus
three plain word lists (function words, stopwords, abbreviations). A
determinant is the surface pattern between two content words: the first
word's inflexion, the intervening function words, and the second word's
inflexion. Each determinant names an ordered list of correlators; a
correlator resolves the pattern to a typed relation via pairs of semantic
attributes. Within one determinant the correlators' attribute-pair sets
must not intersect, which is what makes relation resolution unambiguous.

All dictionary lookups are case-insensitive (entries are lowercased on
load); token surfaces keep their original casing elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import LexiconError

POS_TAGS = ("noun", "verb", "adjective", "adverb", "abbreviation", "other")
HEAD_POSITIONS = ("first", "second")

# Canonical dictionary file names inside a lexicon directory.
LEXICON_FILES = {
    "stems": "stems.tsv",
    "inflexions": "inflexions.tsv",
    "determinants": "determinants.tsv",
    "correlators": "correlators.tsv",
    "function_words": "function_words.txt",
    "stopwords": "stopwords.txt",
    "abbreviations": "abbreviations.txt",
}


@dataclass(frozen=True)
class StemEntry:
    stem: str
    pos: str
    gram_attrs: frozenset[str]
    sem_attrs: frozenset[str]


@dataclass(frozen=True)
class InflexionEntry:
    form: str  # "" is the zero inflexion
    gram_attrs: frozenset[str]


@dataclass(frozen=True)
class DeterminantKey:
    first_inflexion: str
    function_words: tuple[str, ...]
    second_inflexion: str


@dataclass(frozen=True)
class CorrelatorEntry:
    id: str
    relation_name: str
    head_position: str  # "first" | "second": which member of the surface pair is the head
    attr_pairs: frozenset[tuple[str, str]]  # (head semantic attr, dependent semantic attr)


@dataclass(frozen=True)
class DeterminantEntry:
    key: DeterminantKey
    correlator_ids: tuple[str, ...]


@dataclass
class Lexicon:
    stems: dict[str, list[StemEntry]]
    inflexions: list[InflexionEntry]
    determinants: dict[DeterminantKey, DeterminantEntry]
    correlators: dict[str, CorrelatorEntry]
    function_words: set[str] = field(default_factory=set)
    stopwords: set[str] = field(default_factory=set)
    abbreviations: set[str] = field(default_factory=set)

    @property
    def stem_count(self) -> int:
        return sum(len(v) for v in self.stems.values())

    def inflexion_forms(self) -> set[str]:
        return {entry.form for entry in self.inflexions}


def _read_records(path: Path) -> Iterable[tuple[int, str]]:
    """Yield (line_number, stripped_line) skipping blanks and # comments."""
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise LexiconError(f"{path}: not valid UTF-8: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, line


def _split_fields(path: Path, lineno: int, line: str, expected: int) -> list[str]:
    fields = line.split("\t")
    if len(fields) != expected:
        raise LexiconError(
            f"{path.name}:{lineno}: expected {expected} tab-separated fields, got {len(fields)}"
        )
    return [f.strip() for f in fields]


def _parse_attr_set(raw: str) -> frozenset[str]:
    raw = raw.strip()
    if not raw or raw == "-":
        return frozenset()
    return frozenset(part.strip() for part in raw.split(",") if part.strip())


def _load_stems(path: Path) -> dict[str, list[StemEntry]]:
    stems: dict[str, list[StemEntry]] = {}
    for lineno, line in _read_records(path):
        stem, pos, gram, sem = _split_fields(path, lineno, line, 4)
        if not stem:
            raise LexiconError(f"{path.name}:{lineno}: empty stem")
        if pos not in POS_TAGS:
            raise LexiconError(f"{path.name}:{lineno}: unknown part of speech {pos!r}")
        entry = StemEntry(stem.lower(), pos, _parse_attr_set(gram), _parse_attr_set(sem))
        stems.setdefault(entry.stem, []).append(entry)
    return stems


def _load_inflexions(path: Path) -> list[InflexionEntry]:
    inflexions = []
    for lineno, line in _read_records(path):
        form, gram = _split_fields(path, lineno, line, 2)
        form = "" if form == "-" else form.lower()
        inflexions.append(InflexionEntry(form, _parse_attr_set(gram)))
    return inflexions


def _load_correlators(path: Path) -> dict[str, CorrelatorEntry]:
    correlators: dict[str, CorrelatorEntry] = {}
    for lineno, line in _read_records(path):
        cid, relation, head_pos, pairs_raw = _split_fields(path, lineno, line, 4)
        if not cid:
            raise LexiconError(f"{path.name}:{lineno}: empty correlator id")
        if cid in correlators:
            raise LexiconError(f"{path.name}:{lineno}: duplicate correlator id {cid!r}")
        if not relation:
            raise LexiconError(f"{path.name}:{lineno}: empty relation name for {cid!r}")
        if head_pos not in HEAD_POSITIONS:
            raise LexiconError(
                f"{path.name}:{lineno}: head position must be 'first' or 'second', got {head_pos!r}"
            )
        pairs = set()
        for item in pairs_raw.split(";"):
            item = item.strip()
            if not item:
                continue
            if ":" not in item:
                raise LexiconError(
                    f"{path.name}:{lineno}: attribute pair {item!r} is not 'HEAD:DEP'"
                )
            head_attr, dep_attr = (part.strip() for part in item.split(":", 1))
            if not head_attr or not dep_attr:
                raise LexiconError(f"{path.name}:{lineno}: incomplete attribute pair {item!r}")
            pairs.add((head_attr, dep_attr))
        if not pairs:
            raise LexiconError(f"{path.name}:{lineno}: correlator {cid!r} has no attribute pairs")
        correlators[cid] = CorrelatorEntry(cid, relation, head_pos, frozenset(pairs))
    return correlators


def _load_determinants(
    path: Path, function_words: set[str]
) -> dict[DeterminantKey, DeterminantEntry]:
    determinants: dict[DeterminantKey, DeterminantEntry] = {}
    for lineno, line in _read_records(path):
        first, fws_raw, second, ids_raw = _split_fields(path, lineno, line, 4)
        first = "" if first == "-" else first.lower()
        second = "" if second == "-" else second.lower()
        if fws_raw == "-" or not fws_raw:
            fws: tuple[str, ...] = ()
        else:
            fws = tuple(w.lower() for w in fws_raw.split())
        for word in fws:
            if word not in function_words:
                raise LexiconError(
                    f"{path.name}:{lineno}: {word!r} is not in the function-word list"
                )
        ids = tuple(part.strip() for part in ids_raw.split(",") if part.strip())
        if not ids:
            raise LexiconError(f"{path.name}:{lineno}: determinant lists no correlators")
        key = DeterminantKey(first, fws, second)
        if key in determinants:
            raise LexiconError(f"{path.name}:{lineno}: duplicate determinant {key}")
        determinants[key] = DeterminantEntry(key, ids)
    return determinants


def _load_wordlist(path: Path) -> set[str]:
    return {line.strip().lower() for _, line in _read_records(path)}


def _check_cross_references(lexicon: Lexicon) -> None:
    for det in lexicon.determinants.values():
        for cid in det.correlator_ids:
            if cid not in lexicon.correlators:
                raise LexiconError(
                    f"determinant {_format_key(det.key)} references unknown correlator {cid!r}"
                )
        listed = [lexicon.correlators[cid] for cid in det.correlator_ids]
        for i, c1 in enumerate(listed):
            for c2 in listed[i + 1 :]:
                shared = c1.attr_pairs & c2.attr_pairs
                if shared:
                    pair = sorted(shared)[0]
                    raise LexiconError(
                        f"determinant {_format_key(det.key)}: correlators {c1.id!r} and "
                        f"{c2.id!r} share the attribute pair {pair[0]}:{pair[1]}"
                    )


def _format_key(key: DeterminantKey) -> str:
    fws = " ".join(key.function_words) if key.function_words else "-"
    first = key.first_inflexion or "-"
    second = key.second_inflexion or "-"
    return f"({first}, {fws}, {second})"


def load_lexicon(
    stems: Path | str,
    inflexions: Path | str,
    determinants: Path | str,
    correlators: Path | str,
    function_words: Path | str,
    stopwords: Path | str,
    abbreviations: Path | str,
) -> Lexicon:
    """Load and cross-validate the seven dictionary files."""
    fw = _load_wordlist(Path(function_words))
    lexicon = Lexicon(
        stems=_load_stems(Path(stems)),
        inflexions=_load_inflexions(Path(inflexions)),
        determinants=_load_determinants(Path(determinants), fw),
        correlators=_load_correlators(Path(correlators)),
        function_words=fw,
        stopwords=_load_wordlist(Path(stopwords)),
        abbreviations=_load_wordlist(Path(abbreviations)),
    )
    _check_cross_references(lexicon)
    return lexicon


def load_lexicon_dir(directory: Path | str) -> Lexicon:
    """Load a lexicon from a directory using the canonical file names."""
    directory = Path(directory)
    paths = {}
    for kind, name in LEXICON_FILES.items():
        path = directory / name
        if not path.is_file():
            raise LexiconError(f"missing dictionary file: {path}")
        paths[kind] = path
    return load_lexicon(**paths)


def lookup_determinant(lexicon: Lexicon, key: DeterminantKey) -> list[str]:
    """Exact-match lookup; empty list when the key is absent."""
    entry = lexicon.determinants.get(key)
    return list(entry.correlator_ids) if entry else []


def match_correlator(
    lexicon: Lexicon,
    ids: Iterable[str],
    first_attrs: set[str] | frozenset[str],
    second_attrs: set[str] | frozenset[str],
) -> Optional[tuple[str, str, str]]:
    """Resolve a correlator list against the semantic attributes of a word pair.

    ``first_attrs``/``second_attrs`` belong to the surface-ordered words. A
    correlator matches when one of its (head, dependent) attribute pairs is
    covered by the attributes on the respective sides, the head side being
    chosen by the correlator's head_position. Returns
    (relation_name, correlator_id, head_position) or None.
    """
    for cid in ids:
        correlator = lexicon.correlators[cid]
        if correlator.head_position == "first":
            head_attrs, dep_attrs = first_attrs, second_attrs
        else:
            head_attrs, dep_attrs = second_attrs, first_attrs
        for head_attr, dep_attr in correlator.attr_pairs:
            if head_attr in head_attrs and dep_attr in dep_attrs:
                return correlator.relation_name, cid, correlator.head_position
    return None
