"""Two-step term extraction and the deeply annotated corpus.

Step one finds candidates in the parsed sentence: every noun or
abbreviation is a one-word (non-compositional) term, and compositional
candidates are the connected subtrees grown from noun heads along the
allowed relation types (object, affiliation, defining, uniformity), with
intervening prepositions and conjunctions kept in the lemma sequence.
Step two validates candidates against the relation-type constraints: a
dependent noun must carry the genitive marker, an absorbed adjective's
semantic attributes must be licensed by a correlator of the same relation.

Because candidates are enumerated as *all* valid connected subtrees, every
shorter sub-term a compositional term decomposes into is itself recorded
with its own occurrences.

The annotated corpus stores, per sentence, the tokens, selected analyses,
relation edges and validated term occurrences; its vocabulary maps every
stream token and every occurring term key to the number of times it is
emitted in the term stream (maximal occurrences become single tokens,
remaining non-stopword content words are emitted as their stems).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import DataError, NotFoundError
from .lexicon import Lexicon
from .morphology import AnalyzedToken, analyze_tokens
from .syntagma import RelationEdge, SentenceParse, parse_sentence
from .textcore import Corpus, CorpusRepository, STATUS_ANNOTATED, Token, split_sentences, tokenize

NON_COMPOSITIONAL = "non_compositional"
COMPOSITIONAL = "compositional"

ALLOWED_RELATIONS = {"object", "affiliation", "defining", "uniformity"}
GENITIVE_MARKER = "genitive"
MAX_TERM_WORDS = 15
# Star-shaped relation trees have exponentially many connected subtrees;
# candidate enumeration stops after this many per syntagma.
MAX_CANDIDATE_SUBSETS = 10_000


@dataclass(frozen=True)
class LemmaInfo:
    """Per-lemma snapshot of the analysis the lemma came from.

    pos is None for function words carried into the lemma sequence.
    """

    pos: Optional[str]
    gram_attrs: frozenset[str] = frozenset()
    sem_attrs: frozenset[str] = frozenset()


@dataclass
class Term:
    lemmas: list[str]
    kind: str
    head: int
    internal_edges: list[tuple[str, int, int]]  # (relation, head lemma idx, dep lemma idx)
    lemma_infos: list[LemmaInfo]

    @property
    def key(self) -> str:
        return "_".join(self.lemmas).lower()

    @property
    def word_count(self) -> int:
        return len(self.lemmas)

    @property
    def head_pos(self) -> Optional[str]:
        return self.lemma_infos[self.head].pos


@dataclass
class TermOccurrence:
    doc_id: str
    sentence_index: int
    spans: list[tuple[int, int]]  # half-open token-index intervals
    key: str


def is_abbreviation_token(at: AnalyzedToken, lexicon: Lexicon) -> bool:
    surface = at.token.surface
    if at.analysis is not None and at.analysis.pos == "abbreviation":
        return True
    if surface.lower() in lexicon.abbreviations:
        return True
    return len(surface) >= 2 and surface.isupper() and surface.isalpha()


def _lemma_info(at: AnalyzedToken, lexicon: Lexicon) -> LemmaInfo:
    analysis = at.analysis
    assert analysis is not None
    pos = "abbreviation" if is_abbreviation_token(at, lexicon) else analysis.pos
    return LemmaInfo(pos, analysis.gram_attrs, analysis.sem_attrs)


def _connected_subsets(members: list[int], adjacency: dict[int, set[int]]) -> list[frozenset[int]]:
    """All connected subsets of size >= 2, deduplicated, in deterministic order."""
    found: set[frozenset[int]] = set()
    ordered: list[frozenset[int]] = []

    def grow(subset: frozenset[int]) -> None:
        if len(found) >= MAX_CANDIDATE_SUBSETS:
            return
        frontier = set()
        for node in subset:
            frontier |= adjacency.get(node, set())
        for node in sorted(frontier - subset):
            bigger = subset | {node}
            if bigger in found:
                continue
            if len(found) >= MAX_CANDIDATE_SUBSETS:
                return
            found.add(bigger)
            ordered.append(bigger)
            if len(bigger) < MAX_TERM_WORDS:
                grow(bigger)

    for seed in members:
        grow(frozenset([seed]))
    return ordered


def _subtree_root(nodes: frozenset[int], edges: list[RelationEdge]) -> Optional[int]:
    dependents = {e.dependent for e in edges}
    roots = [n for n in nodes if n not in dependents]
    return roots[0] if len(roots) == 1 else None


def _build_term(
    parse: SentenceParse,
    lexicon: Lexicon,
    nodes: frozenset[int],
    edges: list[RelationEdge],
    doc_id: str,
    sentence_index: int,
) -> Optional[tuple[Term, TermOccurrence]]:
    """Assemble a compositional candidate from a connected member set, or None
    when the members are not contiguous modulo function words or exceed the
    length cap."""
    ordered = sorted(nodes)
    lemmas: list[str] = []
    infos: list[LemmaInfo] = []
    lemma_index: dict[int, int] = {}
    for position, token_index in enumerate(ordered):
        if position > 0:
            for gap_index in range(ordered[position - 1] + 1, token_index):
                gap_token = parse.tokens[gap_index]
                if not gap_token.is_function_word:
                    return None
                lemmas.append(gap_token.token.surface.lower())
                infos.append(LemmaInfo(None))
        lemma_index[token_index] = len(lemmas)
        at = parse.tokens[token_index]
        lemmas.append(at.analysis.stem.stem)
        infos.append(_lemma_info(at, lexicon))
    if len(lemmas) > MAX_TERM_WORDS:
        return None
    root = _subtree_root(nodes, edges)
    if root is None:
        return None
    term = Term(
        lemmas=lemmas,
        kind=COMPOSITIONAL,
        head=lemma_index[root],
        internal_edges=[
            (e.relation_name, lemma_index[e.head], lemma_index[e.dependent]) for e in edges
        ],
        lemma_infos=infos,
    )
    occurrence = TermOccurrence(
        doc_id, sentence_index, [(ordered[0], ordered[-1] + 1)], term.key
    )
    return term, occurrence


def extract_candidates(
    parse: SentenceParse, lexicon: Lexicon, doc_id: str = "", sentence_index: int = 0
) -> list[tuple[Term, TermOccurrence]]:
    """Step one: every noun/abbreviation plus all connected growths along
    allowed relations."""
    results: list[tuple[Term, TermOccurrence]] = []
    for syntagma in parse.syntagmas:
        for index in syntagma.members:
            at = parse.tokens[index]
            info = _lemma_info(at, lexicon)
            if info.pos in ("noun", "abbreviation"):
                term = Term([at.analysis.stem.stem], NON_COMPOSITIONAL, 0, [], [info])
                results.append(
                    (term, TermOccurrence(doc_id, sentence_index, [(index, index + 1)], term.key))
                )
        allowed_edges = [e for e in syntagma.edges if e.relation_name in ALLOWED_RELATIONS]
        adjacency: dict[int, set[int]] = {}
        for e in allowed_edges:
            adjacency.setdefault(e.head, set()).add(e.dependent)
            adjacency.setdefault(e.dependent, set()).add(e.head)
        noun_members = [
            i
            for i in syntagma.members
            if parse.tokens[i].analysis is not None
            and parse.tokens[i].analysis.pos == "noun"
        ]
        for subset in _connected_subsets(noun_members, adjacency):
            induced = [
                e for e in allowed_edges if e.head in subset and e.dependent in subset
            ]
            built = _build_term(parse, lexicon, subset, induced, doc_id, sentence_index)
            if built is not None:
                results.append(built)
    results.sort(key=lambda pair: (pair[1].spans[0], pair[0].key))
    return results


def _edge_ends(term: Term, edge: tuple[str, int, int]) -> tuple[LemmaInfo, LemmaInfo]:
    _, head_idx, dep_idx = edge
    return term.lemma_infos[head_idx], term.lemma_infos[dep_idx]


def _adjective_licensed(term: Term, edge: tuple[str, int, int], lexicon: Lexicon) -> bool:
    relation, head_idx, dep_idx = edge
    head, dep = term.lemma_infos[head_idx], term.lemma_infos[dep_idx]
    for correlator in lexicon.correlators.values():
        if correlator.relation_name != relation:
            continue
        for head_attr, dep_attr in correlator.attr_pairs:
            if head_attr in head.sem_attrs and dep_attr in dep.sem_attrs:
                return True
    return False


def validate_terms(candidates: list[Term], lexicon: Lexicon) -> list[Term]:
    """Step two: keep candidates whose internal relations obey the term grammar."""
    kept = []
    for term in candidates:
        if term.kind == NON_COMPOSITIONAL:
            if term.word_count == 1 and term.head_pos in ("noun", "abbreviation"):
                kept.append(term)
            continue
        if not 2 <= term.word_count <= MAX_TERM_WORDS:
            continue
        if term.head_pos != "noun":
            continue
        if any(
            info.pos not in (None, "noun", "adjective")
            for info in term.lemma_infos
        ):
            continue
        if not all(_edge_valid(term, edge, lexicon) for edge in term.internal_edges):
            continue
        kept.append(term)
    return kept


def _edge_valid(term: Term, edge: tuple[str, int, int], lexicon: Lexicon) -> bool:
    relation = edge[0]
    if relation not in ALLOWED_RELATIONS:
        return False
    head, dep = _edge_ends(term, edge)
    if relation == "uniformity":
        return (head.pos, dep.pos) in (("noun", "noun"), ("adjective", "adjective"))
    if relation == "defining":
        return head.pos == "noun" and dep.pos == "adjective" and _adjective_licensed(
            term, edge, lexicon
        )
    # object / affiliation: a dependent noun stands in the genitive
    if head.pos != "noun" or dep.pos != "noun":
        return False
    return GENITIVE_MARKER in dep.gram_attrs


def decompose(term: Term) -> list[Term]:
    """Every contiguous sub-sequence of a compositional term that is itself a
    well-formed shorter term, with its connecting relations."""
    if term.kind != COMPOSITIONAL:
        raise DataError("decompose requires a compositional term")
    subs: list[Term] = []
    n = len(term.lemmas)
    for start in range(n):
        for end in range(start + 1, n + 1):
            if (start, end) == (0, n):
                continue
            if term.lemma_infos[start].pos is None or term.lemma_infos[end - 1].pos is None:
                continue
            content = [
                i for i in range(start, end) if term.lemma_infos[i].pos is not None
            ]
            if len(content) == 1:
                info = term.lemma_infos[content[0]]
                if info.pos in ("noun", "abbreviation"):
                    subs.append(
                        Term([term.lemmas[content[0]]], NON_COMPOSITIONAL, 0, [], [info])
                    )
                continue
            edges = [
                e for e in term.internal_edges if start <= e[1] < end and start <= e[2] < end
            ]
            if not _connected(content, edges):
                continue
            dependents = {e[2] for e in edges}
            roots = [i for i in content if i not in dependents]
            if len(roots) != 1:
                continue
            sub = Term(
                lemmas=term.lemmas[start:end],
                kind=COMPOSITIONAL,
                head=roots[0] - start,
                internal_edges=[(r, h - start, d - start) for r, h, d in edges],
                lemma_infos=term.lemma_infos[start:end],
            )
            subs.append(sub)
    return subs


def _connected(content: list[int], edges: list[tuple[str, int, int]]) -> bool:
    if not content:
        return False
    adjacency: dict[int, set[int]] = {i: set() for i in content}
    for _, h, d in edges:
        adjacency[h].add(d)
        adjacency[d].add(h)
    seen = {content[0]}
    queue = [content[0]]
    while queue:
        node = queue.pop()
        for nxt in adjacency[node]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(content)


@dataclass
class SentenceRecord:
    doc_id: str
    index: int
    tokens: list[Token]
    analyzed: list[AnalyzedToken]
    edges: list[RelationEdge]
    syntagma_count: int
    occurrences: list[TermOccurrence]
    terms: list[Term]
    stream_tokens: list[tuple[str, Optional[str]]] = field(default_factory=list)

    def stream_line(self) -> str:
        return " ".join(token for token, _ in self.stream_tokens)


@dataclass
class VocabEntry:
    freq: int
    head_pos: str


@dataclass
class AnnotatedCorpus:
    corpus_id: str
    sentences: list[SentenceRecord]
    vocabulary: dict[str, VocabEntry]

    def stream_lines(self) -> list[str]:
        return [record.stream_line() for record in self.sentences]


def _select_maximal(occurrences: list[TermOccurrence]) -> list[TermOccurrence]:
    """Longest-first (leftmost on ties) non-overlapping occurrence selection."""
    remaining = sorted(
        occurrences, key=lambda o: (-(o.spans[0][1] - o.spans[0][0]), o.spans[0][0], o.key)
    )
    chosen: list[TermOccurrence] = []
    covered: set[int] = set()
    for occurrence in remaining:
        start, end = occurrence.spans[0]
        if any(i in covered for i in range(start, end)):
            continue
        chosen.append(occurrence)
        covered.update(range(start, end))
    return sorted(chosen, key=lambda o: o.spans[0])


def _emit_sentence(
    record: SentenceRecord, term_pos: dict[str, str]
) -> list[tuple[str, Optional[str]]]:
    """Stream tokens for one sentence: (token, pos tag) pairs in surface order."""
    maximal = _select_maximal(record.occurrences)
    covered: set[int] = set()
    emitted: list[tuple[int, str, Optional[str]]] = []
    for occurrence in maximal:
        start, end = occurrence.spans[0]
        covered.update(range(start, end))
        emitted.append((start, occurrence.key, term_pos.get(occurrence.key)))
    for index, at in enumerate(record.analyzed):
        if index in covered or not at.is_content or at.is_stopword:
            continue
        if at.analysis is None:
            continue
        emitted.append((index, at.analysis.stem.stem, at.analysis.pos))
    emitted.sort(key=lambda item: item[0])
    return [(token, pos) for _, token, pos in emitted]


def annotate_sentence(
    tokens: list[Token], lexicon: Lexicon, doc_id: str = "", index: int = 0
) -> SentenceRecord:
    analyzed = analyze_tokens(tokens, lexicon)
    parse = parse_sentence(analyzed, lexicon)
    candidates = extract_candidates(parse, lexicon, doc_id, index)
    valid_keys = {id(t) for t in validate_terms([t for t, _ in candidates], lexicon)}
    kept = [(t, o) for t, o in candidates if id(t) in valid_keys]
    record = SentenceRecord(
        doc_id=doc_id,
        index=index,
        tokens=tokens,
        analyzed=analyzed,
        edges=parse.all_edges(),
        syntagma_count=parse.unlinked_count,
        occurrences=[o for _, o in kept],
        terms=[t for t, _ in kept],
    )
    local_pos = {t.key: t.head_pos or "other" for t in record.terms}
    record.stream_tokens = _emit_sentence(record, local_pos)
    return record


def annotate_corpus(
    corpus: Corpus,
    lexicon: Lexicon,
    repository: "AnnotatedRepository | None" = None,
    corpus_repository: CorpusRepository | None = None,
) -> AnnotatedCorpus:
    """Run the full pipeline over a corpus and aggregate the vocabulary."""
    records: list[SentenceRecord] = []
    for document in corpus.documents:
        sentences = split_sentences(
            tokenize(document.text), lexicon.abbreviations, document.id
        )
        for sentence in sentences:
            records.append(
                annotate_sentence(sentence.tokens, lexicon, document.id, sentence.index)
            )

    term_pos: dict[str, str] = {}
    for record in records:
        for term in record.terms:
            term_pos.setdefault(term.key, term.head_pos or "other")

    counts: Counter[str] = Counter()
    pos_votes: dict[str, Counter] = {}
    for record in records:
        for token, pos in record.stream_tokens:
            counts[token] += 1
            pos_votes.setdefault(token, Counter())[pos or "other"] += 1
    vocabulary: dict[str, VocabEntry] = {}
    for token, freq in counts.items():
        votes = pos_votes[token]
        top = max(votes.items(), key=lambda kv: (kv[1], kv[0]))
        best_count = top[1]
        head_pos = min(pos for pos, c in votes.items() if c == best_count)
        vocabulary[token] = VocabEntry(freq, head_pos)
    for record in records:
        for occurrence in record.occurrences:
            if occurrence.key not in vocabulary:
                vocabulary[occurrence.key] = VocabEntry(0, term_pos[occurrence.key])

    annotated = AnnotatedCorpus(corpus.id, records, vocabulary)
    if repository is not None:
        repository.save(annotated)
    if corpus_repository is not None and corpus_repository.exists(corpus.id):
        corpus_repository.set_status(corpus.id, STATUS_ANNOTATED)
    return annotated


class AnnotatedRepository:
    """Filesystem store: annotated/<id>/{sentences.jsonl, vocab.tsv, stream.txt}."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def annotated_dir(self, corpus_id: str) -> Path:
        return self.root / "annotated" / corpus_id

    def exists(self, corpus_id: str) -> bool:
        return (self.annotated_dir(corpus_id) / "vocab.tsv").is_file()

    def list_ids(self) -> list[str]:
        base = self.root / "annotated"
        if not base.is_dir():
            return []
        return sorted(p.name for p in base.iterdir() if (p / "vocab.tsv").is_file())

    def save(self, annotated: AnnotatedCorpus) -> None:
        directory = self.annotated_dir(annotated.corpus_id)
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / "sentences.jsonl").open("w", encoding="utf-8") as handle:
            for record in annotated.sentences:
                handle.write(json.dumps(_record_to_json(record), ensure_ascii=False) + "\n")
        with (directory / "vocab.tsv").open("w", encoding="utf-8") as handle:
            for key in sorted(annotated.vocabulary):
                entry = annotated.vocabulary[key]
                handle.write(f"{key}\t{entry.freq}\t{entry.head_pos}\n")
        (directory / "stream.txt").write_text(
            "\n".join(annotated.stream_lines()) + "\n", encoding="utf-8"
        )

    def stream_path(self, corpus_id: str) -> Path:
        path = self.annotated_dir(corpus_id) / "stream.txt"
        if not path.is_file():
            raise NotFoundError(f"unknown annotated corpus id: {corpus_id!r}")
        return path

    def load_vocab(self, corpus_id: str) -> dict[str, VocabEntry]:
        path = self.annotated_dir(corpus_id) / "vocab.tsv"
        if not path.is_file():
            raise NotFoundError(f"unknown annotated corpus id: {corpus_id!r}")
        vocabulary = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            key, freq, head_pos = line.split("\t")
            vocabulary[key] = VocabEntry(int(freq), head_pos)
        return vocabulary

    def summary(self, corpus_id: str) -> dict:
        vocabulary = self.load_vocab(corpus_id)
        sentences = (
            (self.annotated_dir(corpus_id) / "sentences.jsonl")
            .read_text(encoding="utf-8")
            .splitlines()
        )
        return {
            "id": corpus_id,
            "sentences": len([line for line in sentences if line.strip()]),
            "vocabulary_size": len(vocabulary),
            "term_keys": sum(1 for key in vocabulary if "_" in key),
        }


def _record_to_json(record: SentenceRecord) -> dict:
    analyses = []
    for at in record.analyzed:
        if at.analysis is None:
            analyses.append(None)
        else:
            analysis = at.analysis
            analyses.append(
                {
                    "stem": analysis.stem.stem,
                    "inflexion": analysis.inflexion.form,
                    "pos": analysis.pos,
                    "gram": sorted(analysis.gram_attrs),
                    "sem": sorted(analysis.sem_attrs),
                    "fallback": analysis.is_fallback,
                }
            )
    return {
        "doc": record.doc_id,
        "index": record.index,
        "tokens": [
            {"surface": t.surface, "start": t.start, "end": t.end, "kind": t.kind}
            for t in record.tokens
        ],
        "analyses": analyses,
        "function_words": [at.is_function_word for at in record.analyzed],
        "stopwords": [at.is_stopword for at in record.analyzed],
        "edges": [
            {
                "head": e.head,
                "dep": e.dependent,
                "relation": e.relation_name,
                "correlator": e.correlator_id,
            }
            for e in record.edges
        ],
        "syntagma_count": record.syntagma_count,
        "terms": [
            {"key": o.key, "spans": [list(span) for span in o.spans]}
            for o in record.occurrences
        ],
        "stream": [token for token, _ in record.stream_tokens],
    }
