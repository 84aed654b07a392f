from __future__ import annotations

import numpy as np
import pytest

from termspace.embeddings import TermVectorModel, Vocabulary, VocabularyEntry
from termspace.errors import DataError, UnknownTermError
from termspace.vectorstore import (
    QueryFilter,
    analogy,
    centroid,
    has_metadata,
    load_model,
    neighbors,
    oov_vector,
    save_model,
    similarity,
)


def make_model(rows: dict[str, list[float]], meta: dict | None = None) -> TermVectorModel:
    entries = {}
    matrix = np.zeros((len(rows), len(next(iter(rows.values())))), dtype=np.float64)
    for idx, (key, vector) in enumerate(rows.items()):
        freq, pos = (meta or {}).get(key, (0, None))
        entries[key] = VocabularyEntry(idx, freq, pos)
        matrix[idx] = vector
    return TermVectorModel(Vocabulary(entries), matrix, None, matrix.shape[1])


@pytest.fixture
def six_term_model():
    rows = {
        "alpha": [1.0, 0.2, 0.0],
        "beta": [0.9, 0.3, 0.1],
        "gamma": [0.0, 1.0, 0.0],
        "delta": [0.1, 0.9, 0.2],
        "epsilon": [-1.0, 0.0, 0.3],
        "zeta": [0.4, 0.4, 0.4],
    }
    meta = {
        "alpha": (10, "noun"),
        "beta": (5, "noun"),
        "gamma": (3, "verb"),
        "delta": (2, "noun"),
        "epsilon": (1, "noun"),
        "zeta": (8, "verb"),
    }
    return make_model(rows, meta)


def brute_force_neighbors(model, vector, exclude, topn, pos=None, min_freq=None):
    """Independent exhaustive oracle: plain loops, plain cosine."""
    scored = []
    for key, entry in model.vocabulary.entries.items():
        if key in exclude:
            continue
        if pos is not None and entry.head_pos != pos:
            continue
        if min_freq is not None and entry.frequency < min_freq:
            continue
        row = model.input_vectors[entry.id]
        denominator = float(np.sqrt((row**2).sum()) * np.sqrt((vector**2).sum()))
        if denominator == 0:
            continue
        scored.append((float(row @ vector) / denominator, key))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [(key, score) for score, key in scored[:topn]]


def test_save_load_round_trip(tmp_path, six_term_model):
    save_model(six_term_model, tmp_path / "m")
    loaded = load_model(tmp_path / "m")
    assert loaded.dim == six_term_model.dim
    assert set(loaded.vocabulary.entries) == set(six_term_model.vocabulary.entries)
    for key in six_term_model.vocabulary.entries:
        original = six_term_model.vector(key)
        reloaded = loaded.vector(key)
        assert np.max(np.abs(original - reloaded)) < 1e-6
        assert (
            loaded.vocabulary.entries[key].frequency
            == six_term_model.vocabulary.entries[key].frequency
        )


def test_load_dimension_mismatch(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("2 3\na 1 2 3\nb 1 2 3 4\n", encoding="utf-8")
    with pytest.raises(DataError, match="vectors.txt:3"):
        load_model(path)


def test_load_malformed_header(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("3\na 1 2 3\n", encoding="utf-8")
    with pytest.raises(DataError, match="header"):
        load_model(path)


def test_load_duplicate_key(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("2 2\na 1 2\na 3 4\n", encoding="utf-8")
    with pytest.raises(DataError, match="duplicate"):
        load_model(path)


def test_import_without_meta_disables_filters(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("2 2\na 1.0 0.0\nb 0.0 1.0\n", encoding="utf-8")
    model = load_model(path)
    assert not has_metadata(model)
    # pos filter silently inactive: the verbless model still returns results
    found = neighbors(model, "a", 5, QueryFilter(pos="noun"))
    assert [n.term for n in found] == ["b"]


def test_similarity_identical_vectors(six_term_model):
    model = make_model({"x": [0.3, 0.4], "y": [0.3, 0.4]})
    assert similarity(model, "x", "y") == pytest.approx(1.0)


def test_similarity_orthogonal():
    model = make_model({"x": [1.0, 0.0], "y": [0.0, 1.0]})
    assert similarity(model, "x", "y") == pytest.approx(0.0)


def test_similarity_analytic_value():
    model = make_model({"x": [1.0, 1.0], "y": [1.0, 0.0]})
    assert similarity(model, "x", "y") == pytest.approx(0.70710678, abs=1e-6)


def test_similarity_symmetry(six_term_model):
    keys = list(six_term_model.vocabulary.entries)
    for a in keys:
        for b in keys:
            assert similarity(six_term_model, a, b) == similarity(six_term_model, b, a)


def test_similarity_unknown_term(six_term_model):
    with pytest.raises(UnknownTermError, match="nope"):
        similarity(six_term_model, "alpha", "nope")


def test_similarity_zero_vector():
    model = make_model({"x": [0.0, 0.0], "y": [1.0, 0.0]})
    with pytest.raises(DataError, match="zero vector"):
        similarity(model, "x", "y")


def test_neighbors_match_oracle(six_term_model):
    for topn in (1, 2, 4, 10):
        got = neighbors(six_term_model, "alpha", topn)
        expected = brute_force_neighbors(
            six_term_model, six_term_model.vector("alpha"), {"alpha"}, topn
        )
        assert [(n.term, pytest.approx(n.similarity)) for n in got] == [
            (k, pytest.approx(s)) for k, s in expected
        ]


def test_neighbors_pos_filter(six_term_model):
    found = neighbors(six_term_model, "alpha", 10, QueryFilter(pos="noun"))
    assert found and all(
        six_term_model.vocabulary.entries[n.term].head_pos == "noun" for n in found
    )
    assert "gamma" not in [n.term for n in found]
    assert "zeta" not in [n.term for n in found]


def test_neighbors_min_freq_inclusive(six_term_model):
    found = neighbors(six_term_model, "alpha", 10, QueryFilter(min_freq=5))
    terms = [n.term for n in found]
    assert "beta" in terms  # frequency exactly at the bound stays in
    assert "delta" not in terms and "epsilon" not in terms


def test_neighbors_topn_zero_and_truncation(six_term_model):
    assert neighbors(six_term_model, "alpha", 0) == []
    everything = neighbors(six_term_model, "alpha", 99)
    assert len(everything) == 5  # vocabulary minus the query itself


def test_neighbors_similarity_bounds(six_term_model):
    for key in six_term_model.vocabulary.entries:
        for neighbor in neighbors(six_term_model, key, 10):
            assert -1 - 1e-9 <= neighbor.similarity <= 1 + 1e-9


def test_neighbors_unknown_term(six_term_model):
    with pytest.raises(UnknownTermError):
        neighbors(six_term_model, "nope", 3)


def test_analogy_forced_unit_vectors():
    model = make_model(
        {"y": [0.0, 1.0], "a": [1.0, 0.0], "b": [0.0, 1.0], "x": [1.0, 0.0]}
    )
    found = analogy(model, "y", "a", "b", 3)
    assert found[0].term == "x"
    assert found[0].similarity == pytest.approx(1.0)


def test_analogy_excludes_inputs(six_term_model):
    found = analogy(six_term_model, "alpha", "alpha", "alpha", 10)
    terms = [n.term for n in found]
    assert "alpha" not in terms
    expected = brute_force_neighbors(
        six_term_model, six_term_model.vector("alpha"), {"alpha"}, 10
    )
    assert terms == [k for k, _ in expected]


def test_analogy_matches_oracle(six_term_model):
    target = (
        six_term_model.vector("gamma")
        + six_term_model.vector("alpha")
        - six_term_model.vector("beta")
    )
    got = analogy(six_term_model, "gamma", "alpha", "beta", 10)
    expected = brute_force_neighbors(
        six_term_model, target, {"gamma", "alpha", "beta"}, 10
    )
    assert [n.term for n in got] == [k for k, _ in expected]
    for neighbor, (_, score) in zip(got, expected):
        assert neighbor.similarity == pytest.approx(score)


def test_analogy_unknown_term(six_term_model):
    with pytest.raises(UnknownTermError):
        analogy(six_term_model, "alpha", "beta", "nope", 3)


def test_centroid_single_term(six_term_model):
    vector, found = centroid(six_term_model, ["alpha"], 3)
    assert np.allclose(vector, six_term_model.vector("alpha"))
    assert "alpha" not in [n.term for n in found]


def test_centroid_mean_of_two():
    model = make_model({"x": [1.0, 0.0], "y": [0.0, 1.0], "z": [1.0, 1.0]})
    vector, _ = centroid(model, ["x", "y"], 1)
    assert np.allclose(vector, [0.5, 0.5])


def test_centroid_matches_oracle(six_term_model):
    members = ["alpha", "beta", "zeta"]
    vector, found = centroid(six_term_model, members, 10)
    expected = brute_force_neighbors(six_term_model, vector, set(members), 10)
    assert [n.term for n in found] == [k for k, _ in expected]


def test_centroid_empty_list(six_term_model):
    with pytest.raises(DataError):
        centroid(six_term_model, [], 3)


def test_query_filter_validation():
    with pytest.raises(DataError):
        QueryFilter(min_freq=-1)


def test_oov_vector_from_ngrams(six_term_model):
    vector = oov_vector(six_term_model, "alphabeta", 3, 4)
    assert vector is not None and vector.shape == (3,)
    assert oov_vector(six_term_model, "qqqqq", 3, 3) is None


def test_trained_model_round_trip(tmp_path, annotated):
    from termspace.embeddings import TrainingConfig, train

    config = TrainingConfig(dim=12, window=2, negatives=3, epochs=2, min_count=1, seed=3)
    model = train(annotated.stream_lines(), config)
    save_model(model, tmp_path / "m")
    loaded = load_model(tmp_path / "m")
    assert np.max(np.abs(loaded.input_vectors - model.input_vectors)) < 1e-6
    assert loaded.config is not None and loaded.config.dim == 12
    assert has_metadata(loaded)
