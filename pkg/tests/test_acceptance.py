"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line with its elapsed time and enforcing the stated budget.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
"""

from __future__ import annotations

import itertools
import json
import random
import shutil
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import CORPUS_DIR, LEXICON_DIR, gold_lines


@contextmanager
def criterion(name: str, budget_seconds: float):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL  {name}")
        raise
    elapsed = time.perf_counter() - started
    if elapsed >= budget_seconds:
        print(f"FAIL  {name}  ({elapsed:.2f}s over {budget_seconds:.0f}s budget)")
        raise AssertionError(f"{name}: {elapsed:.2f}s exceeded {budget_seconds}s budget")
    print(f"PASS  {name}  ({elapsed:.2f}s < {budget_seconds:.0f}s)")


def test_lexicon_load_and_disjointness_rejection(tmp_path):
    from termspace.errors import LexiconError
    from termspace.lexicon import load_lexicon_dir

    with criterion("lexicon: fixture loads, overlapping pairs rejected", 1.0):
        lexicon = load_lexicon_dir(LEXICON_DIR)
        assert lexicon.stem_count == 60
        assert len(lexicon.determinants) == 10

        mutated = tmp_path / "lexicon"
        shutil.copytree(LEXICON_DIR, mutated)
        with (mutated / "correlators.tsv").open("a", encoding="utf-8") as handle:
            handle.write("c_dup\tsharing\tfirst\tPROCESS:OBJECT\n")
        with (mutated / "determinants.tsv").open("a", encoding="utf-8") as handle:
            handle.write("ed\t-\ted\tc_aff,c_dup\n")
        with pytest.raises(LexiconError) as err:
            load_lexicon_dir(mutated)
        assert "c_aff" in str(err.value) and "c_dup" in str(err.value)


def test_tokenizer_round_trip_1000_random_strings():
    from termspace.textcore import tokenize

    with criterion("tokenizer: round-trip on 1000 random Unicode strings", 5.0):
        rng = random.Random(31337)
        pool = (
            "abcXYZ äöüßéç абвгґє п'ять 0123456789 .,!?;:-'\"()[]{} "
            "+-*/%$€£ 漢字日本 🌍🚀 \t\n\r  "
        )
        for _ in range(1000):
            text = "".join(rng.choice(pool) for _ in range(rng.randrange(0, 120)))
            tokens = tokenize(text)
            previous_end = 0
            covered = set()
            for token in tokens:
                assert token.start < token.end
                assert token.start >= previous_end
                previous_end = token.end
                assert text[token.start : token.end] == token.surface
                covered.update(range(token.start, token.end))
            for index, char in enumerate(text):
                if index not in covered:
                    assert char.isspace()


def test_morphology_gold_100_percent():
    from termspace.lexicon import load_lexicon_dir
    from termspace.morphology import analyze_tokens
    from termspace.textcore import tokenize

    with criterion("morphology: 100% of gold forms segment and disambiguate", 1.0):
        lexicon = load_lexicon_dir(LEXICON_DIR)
        rows = gold_lines("morph.gold.tsv")
        assert len(rows) >= 40
        for line in rows:
            surface, stem, inflexion, pos = line.split("\t")
            inflexion = "" if inflexion == "-" else inflexion
            analysis = analyze_tokens(tokenize(surface), lexicon)[0].analysis
            assert (analysis.stem.stem, analysis.inflexion.form, analysis.pos) == (
                stem,
                inflexion,
                pos,
            ), surface


def test_parser_gold_and_optimality():
    from termspace.lexicon import load_lexicon_dir
    from termspace.morphology import analyze_tokens
    from termspace.syntagma import content_indices, parse_sentence
    from termspace.textcore import split_sentences, tokenize

    from oracles import min_unlinked_syntagmas

    with criterion("parser: gold agreement and brute-force optimality", 10.0):
        lexicon = load_lexicon_dir(LEXICON_DIR)
        gold = [json.loads(line) for line in gold_lines("parse.gold.jsonl")]
        sentences = []
        for path in sorted(CORPUS_DIR.glob("*.txt")):
            text = path.read_text(encoding="utf-8")
            sentences.extend(split_sentences(tokenize(text), lexicon.abbreviations, path.stem))
        assert len(sentences) == len(gold) >= 30
        for sentence, expected in zip(sentences, gold):
            tokens = analyze_tokens(sentence.tokens, lexicon)
            parse = parse_sentence(tokens, lexicon)
            got_edges = sorted(
                (
                    {"head": e.head, "dep": e.dependent, "relation": e.relation_name}
                    for e in parse.all_edges()
                ),
                key=lambda d: (d["head"], d["dep"]),
            )
            assert got_edges == expected["edges"], expected["tokens"]
            assert parse.unlinked_count == expected["syntagma_count"]
            if len(content_indices(tokens)) <= 8:
                assert parse.unlinked_count == min_unlinked_syntagmas(tokens, lexicon)


def test_term_extraction_gold_and_closure():
    from termspace.lexicon import load_lexicon_dir
    from termspace.termex import COMPOSITIONAL, annotate_sentence, decompose, validate_terms
    from termspace.textcore import split_sentences, tokenize

    with criterion("termex: exact gold term sets, length bounds, closure", 5.0):
        lexicon = load_lexicon_dir(LEXICON_DIR)
        gold = [json.loads(line) for line in gold_lines("terms.gold.jsonl")]
        records = []
        index = 0
        for path in sorted(CORPUS_DIR.glob("*.txt")):
            text = path.read_text(encoding="utf-8")
            for sentence in split_sentences(tokenize(text), lexicon.abbreviations, path.stem):
                record = annotate_sentence(sentence.tokens, lexicon)
                assert sorted({t.key for t in record.terms}) == gold[index]["terms"], (
                    gold[index]["tokens"]
                )
                records.append(record)
                index += 1
        compositional = [
            t for r in records for t in r.terms if t.kind == COMPOSITIONAL
        ]
        for term in compositional:
            assert 2 <= term.word_count <= 15
        for record in records:
            for term in record.terms:
                assert term.head_pos in ("noun", "abbreviation")
        rng = random.Random(7)
        for _ in range(200):
            term = rng.choice(compositional)
            for sub in decompose(term):
                assert validate_terms([sub], lexicon) == [sub]


def test_embeddings_gradients_and_sampler():
    from termspace.embeddings import NegativeSampler, pair_loss_grad

    with criterion("embeddings: gradient check and sampler distribution", 30.0):
        rng = np.random.default_rng(2025)
        h = 1e-4
        worst = 0.0
        for _ in range(20):
            iv = rng.normal(scale=0.7, size=(6, 8))
            ov = rng.normal(scale=0.7, size=(6, 8))
            negatives = [int(x) for x in rng.integers(0, 6, size=3)]
            _, grads_in, grads_out = pair_loss_grad(0, 1, negatives, iv, ov)
            for matrix, grads in ((iv, grads_in), (ov, grads_out)):
                for idx, grad in grads.items():
                    for d in range(8):
                        original = matrix[idx, d]
                        matrix[idx, d] = original + h
                        plus = pair_loss_grad(0, 1, negatives, iv, ov)[0]
                        matrix[idx, d] = original - h
                        minus = pair_loss_grad(0, 1, negatives, iv, ov)[0]
                        matrix[idx, d] = original
                        fd = (plus - minus) / (2 * h)
                        worst = max(worst, abs(fd - grad[d]) / max(abs(fd), 1e-8))
        assert worst < 1e-4

        counts = np.array([500.0, 250.0, 120.0, 60.0, 30.0, 10.0, 3.0])
        sampler = NegativeSampler(counts, np.random.default_rng(77))
        draws = sampler.draw(1_000_000)
        expected = counts**0.75 / (counts**0.75).sum()
        empirical = np.bincount(draws, minlength=len(counts)) / len(draws)
        assert float(np.max(np.abs(empirical - expected))) < 0.01


def test_end_to_end_semantic_separation():
    from termspace.embeddings import TrainingConfig, train

    from synth import two_topic_corpus

    with criterion("end-to-end: two-topic margin >= 0.2", 60.0):
        lines, topic_a, topic_b = two_topic_corpus(seed=7, terms=50, sentences=500)
        config = TrainingConfig(
            algorithm="SGNS", dim=16, window=2, negatives=5, epochs=5, min_count=1, seed=42
        )
        model = train(lines, config)

        def cosine(x, y):
            vx, vy = model.vector(x), model.vector(y)
            return float(vx @ vy / (np.linalg.norm(vx) * np.linalg.norm(vy)))

        intra = [
            cosine(x, y)
            for group in (topic_a, topic_b)
            for x, y in itertools.combinations(group, 2)
        ]
        inter = [cosine(x, y) for x in topic_a for y in topic_b]
        margin = float(np.mean(intra) - np.mean(inter))
        assert margin >= 0.2, margin


def test_vectorstore_round_trip_and_oracles(tmp_path):
    from termspace.embeddings import TermVectorModel, Vocabulary, VocabularyEntry
    from termspace.vectorstore import (
        analogy,
        centroid,
        load_model,
        neighbors,
        save_model,
    )

    with criterion("vectorstore: round-trip and exhaustive-scan agreement", 1.0):
        rows = {
            "alpha": [1.0, 0.2, 0.0],
            "beta": [0.9, 0.3, 0.1],
            "gamma": [0.0, 1.0, 0.0],
            "delta": [0.1, 0.9, 0.2],
            "epsilon": [-1.0, 0.0, 0.3],
            "zeta": [0.4, 0.4, 0.4],
        }
        entries = {}
        matrix = np.zeros((6, 3))
        for idx, (key, vector) in enumerate(rows.items()):
            entries[key] = VocabularyEntry(idx, idx + 1, "noun")
            matrix[idx] = vector
        model = TermVectorModel(Vocabulary(entries), matrix, None, 3)

        save_model(model, tmp_path / "m")
        loaded = load_model(tmp_path / "m")
        assert float(np.max(np.abs(loaded.input_vectors - model.input_vectors))) < 1e-6

        def oracle(vector, exclude, topn):
            scored = []
            for key, entry in model.vocabulary.entries.items():
                if key in exclude:
                    continue
                row = matrix[entry.id]
                scored.append(
                    (
                        float(
                            row @ vector
                            / (np.linalg.norm(row) * np.linalg.norm(vector))
                        ),
                        key,
                    )
                )
            scored.sort(key=lambda item: (-item[0], item[1]))
            return [key for _, key in scored[:topn]]

        for key in rows:
            got = [n.term for n in neighbors(model, key, 4)]
            assert got == oracle(model.vector(key), {key}, 4)

        target = model.vector("gamma") + model.vector("alpha") - model.vector("beta")
        got = [n.term for n in analogy(model, "gamma", "alpha", "beta", 4)]
        assert got == oracle(target, {"gamma", "alpha", "beta"}, 4)

        members = ["alpha", "beta"]
        mean, found = centroid(model, members, 4)
        assert np.allclose(mean, (matrix[0] + matrix[1]) / 2)
        assert [n.term for n in found] == oracle(mean, set(members), 4)

        forced = TermVectorModel(
            Vocabulary(
                {
                    "y": VocabularyEntry(0, 1),
                    "a": VocabularyEntry(1, 1),
                    "b": VocabularyEntry(2, 1),
                    "x": VocabularyEntry(3, 1),
                }
            ),
            np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]),
            None,
            2,
        )
        result = analogy(forced, "y", "a", "b", 1)
        assert result[0].term == "x" and result[0].similarity == pytest.approx(1.0)


def test_graph_export_contract():
    from termspace.embeddings import TermVectorModel, Vocabulary, VocabularyEntry
    from termspace.graphexport import build_map
    from termspace.vectorstore import similarity

    with criterion("graph export: thresholds, weights, depth-0 seeds", 1.0):
        rng = np.random.default_rng(5)
        keys = [f"t{i}" for i in range(8)]
        entries = {key: VocabularyEntry(i, i + 1, "noun") for i, key in enumerate(keys)}
        model = TermVectorModel(
            Vocabulary(entries), rng.normal(size=(8, 4)), None, 4
        )

        built = build_map(model, keys[:2], topn=3, threshold=1.01, depth=1)
        assert built.edges == []

        built = build_map(model, keys[:3], topn=3, threshold=0.0, depth=0)
        assert [n["id"] for n in built.nodes] == keys[:3]

        built = build_map(model, keys[:2], topn=3, threshold=0.2, depth=2)
        node_ids = [n["id"] for n in built.nodes]
        pair_count = 0
        for edge in built.edges:
            assert edge["weight"] >= 0.2
            assert (
                abs(edge["weight"] - similarity(model, edge["source"], edge["target"]))
                < 1e-6
            )
            pair_count += 1
        expected_pairs = sum(
            1
            for a, b in itertools.combinations(sorted(node_ids), 2)
            if similarity(model, a, b) >= 0.2
        )
        assert pair_count == expected_pairs


def test_service_contract_suite(tmp_path):
    from fastapi.testclient import TestClient

    from termspace.service import create_app, fold_edits

    with criterion("service: golden responses and edit-log fold", 30.0):
        app = create_app(tmp_path, lexicon_dir=LEXICON_DIR)
        with TestClient(app) as client:
            documents = [
                {"id": path.stem, "text": path.read_text(encoding="utf-8")}
                for path in sorted(CORPUS_DIR.glob("*.txt"))
            ]
            response = client.post(
                "/api/v1/corpora", json={"id": "acc", "documents": documents}
            )
            assert response.status_code == 201
            assert response.json() == {"id": "acc", "document_count": 3}
            assert client.get("/api/v1/corpora/acc").status_code == 200
            assert client.get("/api/v1/corpora/ghost").status_code == 404
            assert (
                client.post(
                    "/api/v1/corpora", json={"id": "acc", "documents": [{"text": "x"}]}
                ).status_code
                == 409
            )

            def wait(job_id):
                for _ in range(1500):
                    body = client.get(f"/api/v1/jobs/{job_id}").json()
                    if body["status"] in ("done", "failed"):
                        return body
                    time.sleep(0.02)
                raise AssertionError("job stuck")

            job = wait(client.post("/api/v1/corpora/acc/annotate", json={}).json()["job_id"])
            assert job["status"] == "done"
            assert client.get("/api/v1/annotated/acc").status_code == 200
            assert (
                client.post("/api/v1/corpora/ghost/annotate", json={}).status_code == 404
            )

            train_request = {
                "annotated_id": "acc",
                "config": {
                    "dim": 12, "window": 2, "negatives": 3, "epochs": 2,
                    "min_count": 1, "seed": 5,
                },
            }
            job = wait(
                client.post("/api/v1/models/train", json=train_request).json()["job_id"]
            )
            assert job["status"] == "done"
            model_id = job["result_id"]
            bad = client.post(
                "/api/v1/models/train",
                json={"annotated_id": "acc", "config": {"epochs": 0}, "model_id": "m0"},
            )
            assert bad.status_code == 400 and "epochs" in bad.json()["error"]["message"]
            assert (
                client.post(
                    "/api/v1/models/train", json={"annotated_id": "ghost"}
                ).status_code
                == 404
            )

            imported = client.post(
                "/api/v1/models/import",
                json={"id": "imp", "content": "2 2\naa 1.0 0.0\nbb 0.0 1.0\n"},
            )
            assert imported.status_code == 201
            assert imported.json()["filters_disabled"] is True

            term = "neural_network"
            body = client.get(
                f"/api/v1/models/{model_id}/similarity", params={"a": term, "b": term}
            ).json()
            assert body["similarity"] == pytest.approx(1.0)
            assert (
                client.get(
                    f"/api/v1/models/{model_id}/similarity", params={"a": term}
                ).status_code
                == 400
            )
            unknown = client.get(
                f"/api/v1/models/{model_id}/analogy",
                params={"y": term, "a": "researcher", "b": "nope"},
            )
            assert unknown.status_code == 404
            assert unknown.json()["error"]["code"] == "unknown_term"
            assert unknown.json()["error"]["term"] == "nope"
            assert (
                client.get(
                    f"/api/v1/models/{model_id}/neighbors",
                    params={"term": term, "topn": 3},
                ).status_code
                == 200
            )
            assert (
                client.post(
                    f"/api/v1/models/{model_id}/centroid",
                    json={"positive": [term], "topn": 2},
                ).status_code
                == 200
            )

            graph = client.get(
                f"/api/v1/models/{model_id}/graph",
                params={"terms": f"{term},researcher,deep_network", "topn": 4,
                        "threshold": -1.0, "depth": 1},
            ).json()
            map_id = graph["id"]
            assert client.get(f"/api/v1/maps/{map_id}").json() == graph
            assert client.get("/api/v1/maps/ghost").status_code == 404
            doc_graph = client.post(
                f"/api/v1/models/{model_id}/document-graph",
                json={"text": "Semantic analysis of texts.", "threshold": 0.0},
            )
            assert doc_graph.status_code == 200

            assert (
                client.post(
                    f"/api/v1/maps/{map_id}/edits",
                    json={"edge": {"source": "gx", "target": "gy"}, "action": "delete"},
                ).status_code
                == 400
            )

            rng = random.Random(909)
            nodes = sorted(n["id"] for n in graph["nodes"])
            applied = 0
            while applied < 100:
                current = client.get(f"/api/v1/maps/{map_id}").json()
                existing = [(e["source"], e["target"]) for e in current["edges"]]
                action = rng.choice(["relabel", "delete", "add"])
                if action in ("relabel", "delete") and not existing:
                    continue
                if action == "add":
                    free = [
                        (a, b)
                        for i, a in enumerate(nodes)
                        for b in nodes[i + 1 :]
                        if (a, b) not in set(existing)
                    ]
                    if not free:
                        continue
                    source, target = rng.choice(free)
                else:
                    source, target = rng.choice(existing)
                body = {"edge": {"source": source, "target": target}, "action": action}
                if action in ("relabel", "add"):
                    body["relation_label"] = rng.choice(["defining", "object", "x"])
                assert (
                    client.post(f"/api/v1/maps/{map_id}/edits", json=body).status_code
                    == 201
                )
                applied += 1

            stored = client.get(f"/api/v1/maps/{map_id}").json()
            log = client.get(f"/api/v1/maps/{map_id}/edits").json()["edits"]
            assert stored == fold_edits(graph, log)
