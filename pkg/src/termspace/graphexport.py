"""Semantic-map graphs: terms as nodes, cosine similarities as edges.

A map is built by breadth-first neighbourhood expansion from seed terms,
then every node pair with cosine at or above the threshold becomes an
undirected edge. Edges are stored once with source < target; the JSON
schema carries a version tag and is the contract shared with the service
and the explorer UI.
"""

from __future__ import annotations

from dataclasses import dataclass
from .embeddings import TermVectorModel
from .errors import DataError, UnknownTermError
from .lexicon import Lexicon
from .termex import annotate_sentence
from .textcore import split_sentences, tokenize
from .vectorstore import has_metadata, neighbors, similarity

SCHEMA_VERSION = 1

DEFAULT_TOPN = 10
DEFAULT_THRESHOLD = 0.55
DEFAULT_DEPTH = 1
MAX_DEPTH = 3


@dataclass
class SemanticMap:
    nodes: list[dict]
    edges: list[dict]
    params: dict

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "nodes": self.nodes,
            "edges": self.edges,
            "params": self.params,
        }


def _node(model: TermVectorModel, key: str, with_meta: bool) -> dict:
    entry = model.vocabulary.entries[key]
    return {
        "id": key,
        "label": key.replace("_", " "),
        "pos": entry.head_pos if with_meta else None,
        "freq": entry.frequency if with_meta else None,
    }


def _pairwise_edges(
    model: TermVectorModel, keys: list[str], threshold: float
) -> list[dict]:
    edges = []
    ordered = sorted(keys)
    for i, source in enumerate(ordered):
        for target in ordered[i + 1 :]:
            weight = similarity(model, source, target)
            if weight >= threshold:
                edges.append({"source": source, "target": target, "weight": weight})
    return edges


def build_map(
    model: TermVectorModel,
    seeds: list[str],
    topn: int = DEFAULT_TOPN,
    threshold: float = DEFAULT_THRESHOLD,
    depth: int = DEFAULT_DEPTH,
) -> SemanticMap:
    """Breadth-first expansion from seeds, then thresholded pairwise edges."""
    if not 0 <= depth <= MAX_DEPTH:
        raise DataError(f"depth must be between 0 and {MAX_DEPTH}, got {depth}")
    for seed in seeds:
        if seed not in model.vocabulary:
            raise UnknownTermError(seed)

    collected: list[str] = []
    seen: set[str] = set()
    for seed in seeds:
        if seed not in seen:
            seen.add(seed)
            collected.append(seed)
    frontier = list(collected)
    for _level in range(depth):
        next_frontier = []
        for node in frontier:
            for neighbor in neighbors(model, node, topn):
                if neighbor.term not in seen:
                    seen.add(neighbor.term)
                    collected.append(neighbor.term)
                    next_frontier.append(neighbor.term)
        frontier = next_frontier

    with_meta = has_metadata(model)
    return SemanticMap(
        nodes=[_node(model, key, with_meta) for key in collected],
        edges=_pairwise_edges(model, collected, threshold),
        params={
            "seeds": list(seeds),
            "topn": topn,
            "threshold": threshold,
            "depth": depth,
        },
    )


def build_document_map(
    model: TermVectorModel,
    text: str,
    lexicon: Lexicon,
    topn: int = DEFAULT_TOPN,
    threshold: float = DEFAULT_THRESHOLD,
) -> SemanticMap:
    """Map of the terms found in one document that exist in the model."""
    keys: list[str] = []
    seen: set[str] = set()
    for sentence in split_sentences(tokenize(text), lexicon.abbreviations):
        record = annotate_sentence(sentence.tokens, lexicon, index=sentence.index)
        for term in record.terms:
            if term.key not in seen and term.key in model.vocabulary:
                seen.add(term.key)
                keys.append(term.key)
    built = build_map(model, keys, topn=topn, threshold=threshold, depth=0)
    built.params["document_terms"] = len(keys)
    return built
