"""Syntagma extraction: typed relations between content words.

A sentence parse starts from the subject-predicate core when one exists,
otherwise from the first content word, and grows groups of related words
(syntagmas) by attaching each new content word to the current group at
either its main word (the head of the group's founding relation) or its
last word. Attachment forms a determinant from the two inflexions and the
function words between the groups, looks it up, and resolves the relation
through the correlator dictionary. Where several options exist the parser
backtracks and keeps the parse with the fewest remaining syntagmas;
finally, adjacent syntagmas are merged pairwise with the same mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .lexicon import DeterminantKey, Lexicon, lookup_determinant, match_correlator
from .morphology import AnalyzedToken, MorphAnalysis, gap_function_words
from .textcore import Sentence

# Backtracking budget per sentence; the best parse found so far is returned
# when the budget runs out.
MAX_BRANCHES = 10_000


@dataclass(frozen=True)
class RelationEdge:
    head: int
    dependent: int
    relation_name: str
    correlator_id: str


@dataclass
class Syntagma:
    members: list[int]
    edges: list[RelationEdge]


@dataclass
class SentenceParse:
    sentence: Optional[Sentence]
    tokens: list[AnalyzedToken]
    syntagmas: list[Syntagma]
    unlinked_count: int
    explored_options: int

    def all_edges(self) -> list[RelationEdge]:
        return [edge for syntagma in self.syntagmas for edge in syntagma.edges]


@dataclass(frozen=True)
class _Block:
    members: tuple[int, ...]  # sorted token indices
    edges: tuple[RelationEdge, ...]  # edges[0] is the founding (main) relation

    @property
    def first(self) -> int:
        return self.members[0]

    @property
    def last(self) -> int:
        return self.members[-1]

    @property
    def main(self) -> int:
        return self.edges[0].head if self.edges else self.members[0]

    def fingerprint(self) -> tuple[int, int, int]:
        return (self.first, self.main, self.last)


def _selected(tokens: list[AnalyzedToken], index: int) -> MorphAnalysis:
    analysis = tokens[index].analysis
    assert analysis is not None, "parse requires disambiguated tokens"
    return analysis


def form_determinant(
    first: AnalyzedToken, second: AnalyzedToken, between: list[AnalyzedToken]
) -> DeterminantKey:
    """Determinant of a candidate phrase: inflexions plus intervening function words."""
    assert first.analysis is not None and second.analysis is not None
    return DeterminantKey(
        first.analysis.inflexion.form,
        tuple(at.token.surface.lower() for at in between),
        second.analysis.inflexion.form,
    )


def _match_pair(
    lexicon: Lexicon,
    tokens: list[AnalyzedToken],
    first: int,
    gap: tuple[str, ...],
    second: int,
) -> Optional[RelationEdge]:
    """Try to relate the surface-ordered content pair (first, second)."""
    key = DeterminantKey(
        _selected(tokens, first).inflexion.form, gap, _selected(tokens, second).inflexion.form
    )
    ids = lookup_determinant(lexicon, key)
    if not ids:
        return None
    match = match_correlator(
        lexicon, ids, _selected(tokens, first).sem_attrs, _selected(tokens, second).sem_attrs
    )
    if match is None:
        return None
    relation, cid, head_position = match
    if head_position == "first":
        return RelationEdge(first, second, relation, cid)
    return RelationEdge(second, first, relation, cid)


def content_indices(tokens: list[AnalyzedToken]) -> list[int]:
    return [i for i, at in enumerate(tokens) if at.is_content]


def find_core(
    tokens: list[AnalyzedToken], lexicon: Lexicon
) -> Optional[tuple[int, int, RelationEdge]]:
    """Leftmost adjacent content pair related by a predicative correlator.

    Returns (subject index, predicate index, edge); the predicate is the
    head of the predicative relation.
    """
    content = content_indices(tokens)
    for a, b in zip(content, content[1:]):
        gap = gap_function_words(tokens, a, b)
        if gap is None:
            continue
        edge = _match_pair(lexicon, tokens, a, gap, b)
        if edge is not None and edge.relation_name == "predicative":
            return edge.dependent, edge.head, edge
    return None


def _attach_options(
    lexicon: Lexicon,
    tokens: list[AnalyzedToken],
    block: _Block,
    word: int,
    gap: tuple[str, ...],
    from_left: bool,
) -> list[RelationEdge]:
    """Edges that could attach a new word to a block, in anchor order
    (main relation word first, then the boundary member)."""
    anchors = [block.main, block.first if from_left else block.last]
    options = []
    seen = set()
    for anchor in anchors:
        if anchor in seen:
            continue
        seen.add(anchor)
        if from_left:
            edge = _match_pair(lexicon, tokens, word, gap, anchor)
        else:
            edge = _match_pair(lexicon, tokens, anchor, gap, word)
        if edge is not None and edge not in options:
            options.append(edge)
    return options


def _merge_options(
    lexicon: Lexicon, tokens: list[AnalyzedToken], blocks: list[_Block]
) -> list[tuple[int, _Block]]:
    """All ways to join a pair of adjacent syntagmas, leftmost pair first.

    Anchor order within a pair: the left block offers its main word then its
    last word, the right block its main word then its first word.
    """
    options = []
    for i in range(len(blocks) - 1):
        left, right = blocks[i], blocks[i + 1]
        gap = gap_function_words(tokens, left.last, right.first)
        if gap is None:
            continue
        x_candidates = [left.main, left.last] if left.main != left.last else [left.main]
        y_candidates = [right.main, right.first] if right.main != right.first else [right.main]
        for x in x_candidates:
            for y in y_candidates:
                edge = _match_pair(lexicon, tokens, x, gap, y)
                if edge is not None:
                    merged = _Block(
                        tuple(sorted(left.members + right.members)),
                        left.edges + right.edges + (edge,),
                    )
                    options.append((i, merged))
    return options


@dataclass
class _Search:
    lexicon: Lexicon
    tokens: list[AnalyzedToken]
    order: list[tuple[int, bool]]  # (content index, from_left)
    prev_content: dict[int, int]  # word -> adjacent processed content index
    explored: int = 0
    best: Optional[list[_Block]] = None
    visited: set = field(default_factory=set)

    def run(self, initial: list[_Block]) -> tuple[list[_Block], int]:
        self._descend(0, initial)
        if self.best is None:
            # Branch budget ran out before any complete parse: fall back to
            # the first-option path, which is always available.
            self.best = self._greedy(initial)
        return self.best, self.explored

    def _greedy(self, blocks: list[_Block]) -> list[_Block]:
        for word, from_left in self.order:
            neighbor = self.prev_content[word]
            lo, hi = (word, neighbor) if from_left else (neighbor, word)
            gap = gap_function_words(self.tokens, lo, hi)
            current = min(blocks, key=lambda b: b.first) if from_left else max(
                blocks, key=lambda b: b.first
            )
            attached = None
            if gap is not None:
                options = _attach_options(
                    self.lexicon, self.tokens, current, word, gap, from_left
                )
                if options:
                    attached = _Block(
                        tuple(sorted(current.members + (word,))),
                        current.edges + (options[0],),
                    )
            if attached is None:
                blocks = blocks + [_Block((word,), ())]
            else:
                blocks = [attached if b is current else b for b in blocks]
        blocks = sorted(blocks, key=lambda b: b.first)
        while True:
            options = _merge_options(self.lexicon, self.tokens, blocks)
            if not options:
                return blocks
            i, merged = options[0]
            blocks = blocks[:i] + [merged] + blocks[i + 2 :]

    def _descend(self, step: int, blocks: list[_Block]) -> None:
        if step == len(self.order):
            self._merge_descend(blocks)
            return
        state = (step, tuple(sorted(b.fingerprint() for b in blocks)))
        if state in self.visited:
            return
        self.visited.add(state)
        word, from_left = self.order[step]
        neighbor = self.prev_content[word]
        lo, hi = (word, neighbor) if from_left else (neighbor, word)
        gap = gap_function_words(self.tokens, lo, hi)
        current = min(blocks, key=lambda b: b.first) if from_left else max(
            blocks, key=lambda b: b.first
        )
        options: list[Optional[RelationEdge]] = []
        if gap is not None:
            options.extend(
                _attach_options(self.lexicon, self.tokens, current, word, gap, from_left)
            )
        options.append(None)  # start a new syntagma
        for option in options:
            if self.explored >= MAX_BRANCHES:
                return
            self.explored += 1
            if option is None:
                next_blocks = blocks + [_Block((word,), ())]
            else:
                grown = _Block(
                    tuple(sorted(current.members + (word,))), current.edges + (option,)
                )
                next_blocks = [grown if b is current else b for b in blocks]
            self._descend(step + 1, next_blocks)

    def _merge_descend(self, blocks: list[_Block]) -> None:
        blocks = sorted(blocks, key=lambda b: b.first)
        state = ("merge", tuple(b.fingerprint() for b in blocks))
        if state in self.visited:
            return
        self.visited.add(state)
        options = _merge_options(self.lexicon, self.tokens, blocks)
        if not options:
            if self.best is None or len(blocks) < len(self.best):
                self.best = blocks
            return
        for i, merged in options:
            if self.explored >= MAX_BRANCHES:
                return
            self.explored += 1
            self._merge_descend(blocks[:i] + [merged] + blocks[i + 2 :])


def parse_sentence(
    tokens: list[AnalyzedToken], lexicon: Lexicon, sentence: Optional[Sentence] = None
) -> SentenceParse:
    """Parse one disambiguated sentence into syntagmas with typed relations."""
    content = content_indices(tokens)
    if not content:
        return SentenceParse(sentence, tokens, [], 0, 0)

    core = find_core(tokens, lexicon)
    if core is not None:
        subject, predicate, edge = core
        initial = [_Block((subject, predicate), (edge,))]
        consumed = {subject, predicate}
        after = [i for i in content if i > predicate]
        before = [i for i in content if i < subject]
    else:
        initial = [_Block((content[0],), ())]
        consumed = {content[0]}
        after = content[1:]
        before = []

    order = [(i, False) for i in after] + [(i, True) for i in sorted(before, reverse=True)]
    prev_content = {}
    for word, from_left in order:
        if from_left:
            prev_content[word] = min(i for i in content if i > word)
        else:
            prev_content[word] = max(i for i in content if i < word)

    search = _Search(lexicon, tokens, order, prev_content)
    blocks, explored = search.run(initial)
    syntagmas = [Syntagma(list(b.members), list(b.edges)) for b in blocks]
    return SentenceParse(sentence, tokens, syntagmas, len(syntagmas), explored)
