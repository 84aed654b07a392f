from __future__ import annotations

import itertools
import shutil

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termspace.errors import LexiconError
from termspace.lexicon import (
    DeterminantKey,
    load_lexicon_dir,
    lookup_determinant,
    match_correlator,
)

from conftest import LEXICON_DIR


def test_fixture_lexicon_counts_match_files(lexicon):
    def records(name):
        lines = (LEXICON_DIR / name).read_text(encoding="utf-8").splitlines()
        return [l for l in lines if l.strip() and not l.lstrip().startswith("#")]

    assert lexicon.stem_count == len(records("stems.tsv")) == 60
    assert len(lexicon.inflexions) == len(records("inflexions.tsv")) == 12
    assert len(lexicon.determinants) == len(records("determinants.tsv")) == 10
    assert len(lexicon.correlators) == len(records("correlators.tsv")) == 12


def test_loading_is_deterministic():
    first = load_lexicon_dir(LEXICON_DIR)
    second = load_lexicon_dir(LEXICON_DIR)
    assert first.stems == second.stems
    assert first.inflexions == second.inflexions
    assert first.determinants == second.determinants
    assert first.correlators == second.correlators


def test_empty_determinant_file_degrades_gracefully(tmp_path):
    target = tmp_path / "lexicon"
    shutil.copytree(LEXICON_DIR, target)
    (target / "determinants.tsv").write_text("# nothing here\n", encoding="utf-8")
    lexicon = load_lexicon_dir(target)
    assert lexicon.determinants == {}
    assert lexicon.stem_count == 60


def test_overlapping_correlator_pairs_rejected_naming_both(tmp_path):
    target = tmp_path / "lexicon"
    shutil.copytree(LEXICON_DIR, target)
    correlators = (target / "correlators.tsv").read_text(encoding="utf-8")
    correlators += "c_dup\tsharing\tfirst\tPROCESS:OBJECT\n"
    (target / "correlators.tsv").write_text(correlators, encoding="utf-8")
    determinants = (target / "determinants.tsv").read_text(encoding="utf-8")
    determinants += "ed\t-\ted\tc_aff,c_dup\n"
    (target / "determinants.tsv").write_text(determinants, encoding="utf-8")
    with pytest.raises(LexiconError) as err:
        load_lexicon_dir(target)
    message = str(err.value)
    assert "c_aff" in message and "c_dup" in message
    assert "PROCESS:OBJECT" in message


def test_dangling_correlator_id_rejected(tmp_path):
    target = tmp_path / "lexicon"
    shutil.copytree(LEXICON_DIR, target)
    determinants = (target / "determinants.tsv").read_text(encoding="utf-8")
    determinants += "ed\t-\ted\tc_ghost\n"
    (target / "determinants.tsv").write_text(determinants, encoding="utf-8")
    with pytest.raises(LexiconError, match="c_ghost"):
        load_lexicon_dir(target)


def test_parse_error_reports_line_number(tmp_path):
    target = tmp_path / "lexicon"
    shutil.copytree(LEXICON_DIR, target)
    (target / "stems.tsv").write_text("word\tnoun\n", encoding="utf-8")
    with pytest.raises(LexiconError, match="stems.tsv:1"):
        load_lexicon_dir(target)


def test_unknown_pos_rejected(tmp_path):
    target = tmp_path / "lexicon"
    shutil.copytree(LEXICON_DIR, target)
    (target / "stems.tsv").write_text("word\tgerund\t-\tOBJECT\n", encoding="utf-8")
    with pytest.raises(LexiconError, match="gerund"):
        load_lexicon_dir(target)


def test_determinant_function_words_must_be_known(tmp_path):
    target = tmp_path / "lexicon"
    shutil.copytree(LEXICON_DIR, target)
    determinants = (target / "determinants.tsv").read_text(encoding="utf-8")
    determinants += "-\tabout\t-\tc_aff\n"
    (target / "determinants.tsv").write_text(determinants, encoding="utf-8")
    with pytest.raises(LexiconError, match="about"):
        load_lexicon_dir(target)


def test_lookup_determinant_fixture_keys(lexicon):
    assert lookup_determinant(lexicon, DeterminantKey("", ("of",), "s")) == ["c_aff"]
    assert lookup_determinant(lexicon, DeterminantKey("", (), "")) == ["c_def"]
    assert lookup_determinant(lexicon, DeterminantKey("zz", (), "zz")) == []


def test_match_correlator_defining(lexicon):
    result = match_correlator(lexicon, ["c_def"], {"QUALITY"}, {"PROCESS"})
    assert result == ("defining", "c_def", "second")


def test_match_correlator_empty_ids(lexicon):
    assert match_correlator(lexicon, [], {"QUALITY"}, {"PROCESS"}) is None


def test_match_correlator_no_pair(lexicon):
    assert match_correlator(lexicon, ["c_aff"], {"QUALITY"}, {"QUALITY"}) is None


@given(
    shared=st.tuples(st.sampled_from("ABCDE"), st.sampled_from("VWXYZ")),
    extra_first=st.sets(st.tuples(st.sampled_from("ABCDE"), st.sampled_from("VWXYZ")), max_size=3),
    extra_second=st.sets(st.tuples(st.sampled_from("ABCDE"), st.sampled_from("VWXYZ")), max_size=3),
)
@settings(max_examples=40, deadline=None)
def test_generated_overlapping_fixtures_rejected(tmp_path_factory, shared, extra_first, extra_second):
    target = tmp_path_factory.mktemp("lex") / "lexicon"
    shutil.copytree(LEXICON_DIR, target)

    def pairs_field(pairs):
        return ";".join(f"{h}:{d}" for h, d in sorted(pairs))

    correlators = (target / "correlators.tsv").read_text(encoding="utf-8")
    correlators += f"c_x1\tlinking\tfirst\t{pairs_field(extra_first | {shared})}\n"
    correlators += f"c_x2\tjoining\tfirst\t{pairs_field(extra_second | {shared})}\n"
    (target / "correlators.tsv").write_text(correlators, encoding="utf-8")
    determinants = (target / "determinants.tsv").read_text(encoding="utf-8")
    determinants += "ing\t-\ting\tc_x1,c_x2\n"
    (target / "determinants.tsv").write_text(determinants, encoding="utf-8")
    with pytest.raises(LexiconError) as err:
        load_lexicon_dir(target)
    assert "c_x1" in str(err.value) and "c_x2" in str(err.value)


def test_disjointness_guarantees_unique_match(lexicon):
    """Singleton attribute scans over the whole attribute universe find at
    most one matching correlator per determinant."""
    universe = set()
    for correlator in lexicon.correlators.values():
        for head, dep in correlator.attr_pairs:
            universe.update((head, dep))
    for det in lexicon.determinants.values():
        for first, second in itertools.product(sorted(universe), repeat=2):
            hits = []
            for cid in det.correlator_ids:
                hit = match_correlator(lexicon, [cid], {first}, {second})
                if hit is not None:
                    hits.append(hit)
            assert len(hits) <= 1, (det.key, first, second, hits)
