from __future__ import annotations

from termspace.morphology import analyze_tokens, fallback_analysis, segment
from termspace.textcore import tokenize

from conftest import gold_lines


def test_segment_texts_single_analysis(lexicon):
    analyses = segment("texts", lexicon)
    assert len(analyses) == 1
    analysis = analyses[0]
    assert (analysis.stem.stem, analysis.inflexion.form, analysis.pos) == ("text", "s", "noun")
    assert "plural" in analysis.gram_attrs


def test_segment_zero_inflexion(lexicon):
    analyses = segment("analysis", lexicon)
    assert len(analyses) == 1
    assert analyses[0].inflexion.form == ""


def test_segment_oov_empty(lexicon):
    assert segment("qqq", lexicon) == []


def test_segment_candidate_ordering_by_stem_length(lexicon):
    analyses = segment("semantics", lexicon)
    assert [(a.stem.stem, a.inflexion.form) for a in analyses] == [
        ("semantics", ""),
        ("semantic", "s"),
    ]
    lengths = [len(a.stem.stem) for a in analyses]
    assert lengths == sorted(lengths, reverse=True)


def test_segment_multiple_stems_same_split(lexicon):
    analyses = segment("model", lexicon)
    assert [(a.stem.stem, a.pos) for a in analyses] == [
        ("model", "noun"),
        ("model", "verb"),
    ]


def test_reconstruction_invariant_over_all_fixture_forms(lexicon):
    for line in gold_lines("morph.gold.tsv"):
        surface = line.split("\t")[0].split()[0]
        analyses = segment(surface, lexicon)
        for analysis in analyses:
            assert analysis.stem.stem + analysis.inflexion.form == surface.lower()
        lengths = [len(a.stem.stem) for a in analyses]
        assert lengths == sorted(lengths, reverse=True)


def test_unambiguous_token_selected(lexicon):
    tokens = analyze_tokens(tokenize("texts"), lexicon)
    assert tokens[0].selected == 0


def test_isolated_ambiguous_form_takes_longest_stem(lexicon):
    tokens = analyze_tokens(tokenize("semantics"), lexicon)
    analysis = tokens[0].analysis
    assert (analysis.stem.stem, analysis.pos) == ("semantics", "noun")


def test_right_context_flips_to_adjective_via_defining(lexicon):
    tokens = analyze_tokens(tokenize("semantics research"), lexicon)
    analysis = tokens[0].analysis
    assert (analysis.stem.stem, analysis.inflexion.form, analysis.pos) == (
        "semantic",
        "s",
        "adjective",
    )


def test_left_context_selects_verb_reading(lexicon):
    # "model" has noun and verb stems; only the left predicative context
    # resolves it here because nothing to the right matches.
    tokens = analyze_tokens(tokenize("researchers model structure"), lexicon)
    model_token = tokens[1]
    assert model_token.analysis.pos == "verb"


def test_oov_fallback_appended_and_selected(lexicon):
    tokens = analyze_tokens(tokenize("blorp"), lexicon)
    token = tokens[0]
    assert token.selected == 0
    assert token.analysis.is_fallback
    assert token.analysis.pos == "other"
    assert token.analysis.gram_attrs == frozenset()
    assert token.analysis.stem.stem == "blorp"


def test_disambiguate_keeps_all_candidates(lexicon):
    tokens = analyze_tokens(tokenize("semantics research"), lexicon)
    assert len(tokens[0].candidates) == 2
    assert tokens[0].selected == 1


def test_function_words_not_analyzed_as_content(lexicon):
    tokens = analyze_tokens(tokenize("analysis of texts"), lexicon)
    of_token = tokens[1]
    assert of_token.is_function_word
    assert not of_token.is_content
    assert of_token.selected is None


def test_fallback_reconstruction():
    analysis = fallback_analysis("Weird-Form")
    assert analysis.stem.stem + analysis.inflexion.form == "weird-form"


def test_gold_fixture_full_agreement(lexicon):
    mismatches = []
    for line in gold_lines("morph.gold.tsv"):
        surface, stem, inflexion, pos = line.split("\t")
        inflexion = "" if inflexion == "-" else inflexion
        tokens = analyze_tokens(tokenize(surface), lexicon)
        analysis = tokens[0].analysis
        got = (analysis.stem.stem, analysis.inflexion.form, analysis.pos)
        if got != (stem, inflexion, pos):
            mismatches.append((surface, got))
    assert not mismatches
