"""Stem + inflexion segmentation and ambiguity resolution.

Each word is split at every point where the prefix is a dictionary stem and
the suffix a dictionary inflexion; candidates are ordered by descending stem
length and then by dictionary order. Ambiguity is resolved with the same
determinant/correlator machinery the parser uses: a candidate that can form
a relation with the nearest content word to the right (then to the left)
wins; remaining ties fall back to the longest stem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .lexicon import (
    DeterminantKey,
    InflexionEntry,
    Lexicon,
    StemEntry,
    lookup_determinant,
    match_correlator,
)
from .textcore import Token, WORD

# A content word separated from its neighbour by more than this many
# function-word tokens is out of determinant range.
MAX_GAP_TOKENS = 4


@dataclass(frozen=True)
class MorphAnalysis:
    stem: StemEntry
    inflexion: InflexionEntry
    is_fallback: bool = False

    @property
    def pos(self) -> str:
        return self.stem.pos

    @property
    def gram_attrs(self) -> frozenset[str]:
        return self.stem.gram_attrs | self.inflexion.gram_attrs

    @property
    def sem_attrs(self) -> frozenset[str]:
        return self.stem.sem_attrs


@dataclass
class AnalyzedToken:
    token: Token
    candidates: list[MorphAnalysis] = field(default_factory=list)
    selected: Optional[int] = None
    is_function_word: bool = False
    is_stopword: bool = False

    @property
    def analysis(self) -> Optional[MorphAnalysis]:
        if self.selected is None:
            return None
        return self.candidates[self.selected]

    @property
    def is_content(self) -> bool:
        """Content words drive parsing: word tokens that are not function words."""
        return self.token.kind == WORD and not self.is_function_word


_ZERO_INFLEXION = InflexionEntry("", frozenset())


def segment(surface: str, lexicon: Lexicon) -> list[MorphAnalysis]:
    """All (stem, inflexion) splits of the lowercased surface, longest stem first.

    Dictionary order breaks ties: stems in stem-file order for one split
    point, inflexion entries in inflexion-file order for one stem.
    """
    form = surface.lower()
    analyses: list[MorphAnalysis] = []
    for split in range(len(form), 0, -1):
        prefix, suffix = form[:split], form[split:]
        stem_entries = lexicon.stems.get(prefix)
        if not stem_entries:
            continue
        matching_inflexions = [inf for inf in lexicon.inflexions if inf.form == suffix]
        for stem_entry in stem_entries:
            for inflexion in matching_inflexions:
                analyses.append(MorphAnalysis(stem_entry, inflexion))
    return analyses


def fallback_analysis(surface: str) -> MorphAnalysis:
    """Synthetic analysis for out-of-vocabulary words: pos 'other', no attributes."""
    stem = StemEntry(surface.lower(), "other", frozenset(), frozenset())
    return MorphAnalysis(stem, _ZERO_INFLEXION, is_fallback=True)


def analyze_tokens(tokens: list[Token], lexicon: Lexicon) -> list[AnalyzedToken]:
    """Attach candidate analyses and word-class flags; then disambiguate."""
    analyzed = []
    for token in tokens:
        at = AnalyzedToken(token)
        if token.kind == WORD:
            lower = token.surface.lower()
            at.is_function_word = lower in lexicon.function_words
            at.is_stopword = lower in lexicon.stopwords
            if not at.is_function_word:
                at.candidates = segment(token.surface, lexicon)
        analyzed.append(at)
    return disambiguate(analyzed, lexicon)


def gap_function_words(
    tokens: list[AnalyzedToken], left: int, right: int
) -> Optional[tuple[str, ...]]:
    """Surfaces of the tokens strictly between two positions, or None when the
    gap contains anything but function words or is longer than MAX_GAP_TOKENS."""
    between = tokens[left + 1 : right]
    if len(between) > MAX_GAP_TOKENS:
        return None
    words = []
    for at in between:
        if not at.is_function_word:
            return None
        words.append(at.token.surface.lower())
    return tuple(words)


def _neighbor_content(
    tokens: list[AnalyzedToken], index: int, step: int
) -> Optional[int]:
    """Nearest content-word index in the given direction reachable across
    function words only."""
    j = index + step
    while 0 <= j < len(tokens):
        at = tokens[j]
        if at.is_content:
            lo, hi = (index, j) if step > 0 else (j, index)
            if gap_function_words(tokens, lo, hi) is None:
                return None
            return j
        if not at.is_function_word:
            return None
        j += step
    return None


def _pair_matches(
    lexicon: Lexicon,
    first: MorphAnalysis,
    gap: tuple[str, ...],
    second: MorphAnalysis,
) -> bool:
    key = DeterminantKey(first.inflexion.form, gap, second.inflexion.form)
    ids = lookup_determinant(lexicon, key)
    if not ids:
        return False
    return match_correlator(lexicon, ids, first.sem_attrs, second.sem_attrs) is not None


def disambiguate(tokens: list[AnalyzedToken], lexicon: Lexicon) -> list[AnalyzedToken]:
    """Select one analysis per content word, in place.

    Preference order for ambiguous words: a candidate that forms a
    determinant+correlator match with the next content word to the right,
    else with the previous one to the left, else the first candidate
    (longest stem, then dictionary order). OOV words receive a fallback
    analysis.
    """
    for i, at in enumerate(tokens):
        if not at.is_content:
            continue
        if not at.candidates:
            at.candidates = [fallback_analysis(at.token.surface)]
            at.selected = 0
            continue
        if len(at.candidates) == 1:
            at.selected = 0
            continue
        at.selected = _pick_candidate(tokens, i, lexicon)
    return tokens


def _pick_candidate(tokens: list[AnalyzedToken], index: int, lexicon: Lexicon) -> int:
    at = tokens[index]
    right = _neighbor_content(tokens, index, +1)
    if right is not None:
        gap = gap_function_words(tokens, index, right)
        for ci, candidate in enumerate(at.candidates):
            if any(
                _pair_matches(lexicon, candidate, gap, other)
                for other in tokens[right].candidates
            ):
                return ci
    left = _neighbor_content(tokens, index, -1)
    if left is not None:
        gap = gap_function_words(tokens, left, index)
        for ci, candidate in enumerate(at.candidates):
            if any(
                _pair_matches(lexicon, other, gap, candidate)
                for other in tokens[left].candidates
            ):
                return ci
    return 0
