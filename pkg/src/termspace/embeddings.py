"""Term embedding training: skip-gram and CBOW with negative sampling.

The trainer is deliberately plain: one worker, a seeded generator, exact
analytic gradients, so a fixed seed reproduces vectors bit for bit. For one
positive pair with k negatives the loss is

    -log s(u_c . v_w) - sum_n log s(-u_n . v_w)

with v the center's input vector and u output vectors. Negatives come from
the unigram distribution raised to 0.75; the learning rate decays linearly
to 1e-4 of its initial value over all planned center words.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Iterable, Optional

import numpy as np

from .errors import ConfigError, DataError

SGNS = "SGNS"
CBOW = "CBOW"

LR_FLOOR_FRACTION = 1e-4
NEGATIVE_EXPONENT = 0.75
INIT_SCALE = 0.5  # input vectors start uniform in [-0.5/dim, +0.5/dim]


@dataclass
class VocabularyEntry:
    id: int
    frequency: int
    head_pos: Optional[str] = None


@dataclass
class Vocabulary:
    entries: dict[str, VocabularyEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def id_of(self, key: str) -> int:
        return self.entries[key].id

    def keys_by_id(self) -> list[str]:
        ordered = sorted(self.entries.items(), key=lambda kv: kv[1].id)
        return [key for key, _ in ordered]

    def frequencies_by_id(self) -> np.ndarray:
        counts = np.zeros(len(self.entries), dtype=np.float64)
        for entry in self.entries.values():
            counts[entry.id] = entry.frequency
        return counts


def build_vocab(
    stream: Iterable[str],
    min_count: int = 1,
    head_pos: Optional[dict[str, str]] = None,
) -> Vocabulary:
    """Count stream tokens, drop rare ones, assign dense ids by frequency.

    Ids are ordered by descending frequency with lexicographic tie-break.
    """
    counts: dict[str, int] = {}
    for line in stream:
        for token in line.split():
            counts[token] = counts.get(token, 0) + 1
    kept = {k: c for k, c in counts.items() if c >= min_count}
    if not kept:
        raise DataError(f"empty vocabulary after min_count={min_count} filtering")
    ordered = sorted(kept.items(), key=lambda kv: (-kv[1], kv[0]))
    entries = {}
    for idx, (key, count) in enumerate(ordered):
        entries[key] = VocabularyEntry(idx, count, (head_pos or {}).get(key))
    return Vocabulary(entries)


@dataclass
class TrainingConfig:
    algorithm: str = SGNS
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    min_count: int = 5
    seed: int = 1
    subsample_threshold: Optional[float] = None

    def validate(self) -> None:
        if self.algorithm not in (SGNS, CBOW):
            raise ConfigError(f"algorithm must be SGNS or CBOW, got {self.algorithm!r}")
        if self.dim < 1:
            raise ConfigError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise ConfigError(f"negatives must be >= 1, got {self.negatives}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.initial_learning_rate <= 0:
            raise ConfigError("initial_learning_rate must be positive")
        if self.min_count < 1:
            raise ConfigError(f"min_count must be >= 1, got {self.min_count}")
        if self.subsample_threshold is not None and self.subsample_threshold <= 0:
            raise ConfigError("subsample_threshold must be positive when set")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TermVectorModel:
    vocabulary: Vocabulary
    input_vectors: np.ndarray
    output_vectors: Optional[np.ndarray]
    dim: int
    config: Optional[TrainingConfig] = None
    epoch_losses: list[float] = field(default_factory=list)

    def vector(self, key: str) -> np.ndarray:
        return self.input_vectors[self.vocabulary.id_of(key)]


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    z = np.exp(x)
    return z / (1.0 + z)


def _log_sigmoid(x: float) -> float:
    return -np.logaddexp(0.0, -x)


def pair_loss_grad(
    center: int,
    context: int,
    negatives: list[int],
    input_vectors: np.ndarray,
    output_vectors: np.ndarray,
) -> tuple[float, dict[int, np.ndarray], dict[int, np.ndarray]]:
    """Loss and exact gradients for one positive pair with its negatives.

    Returns (loss, input_grads, output_grads) with gradients accumulated per
    row id, so a repeated negative contributes twice.
    """
    v = input_vectors[center]
    grad_v = np.zeros_like(v)
    output_grads: dict[int, np.ndarray] = {}

    score = float(np.dot(output_vectors[context], v))
    loss = -_log_sigmoid(score)
    coeff = _sigmoid(score) - 1.0  # d loss / d score for the positive pair
    grad_v += coeff * output_vectors[context]
    output_grads[context] = output_grads.get(context, 0) + coeff * v

    for negative in negatives:
        score = float(np.dot(output_vectors[negative], v))
        loss -= _log_sigmoid(-score)
        coeff = _sigmoid(score)
        grad_v += coeff * output_vectors[negative]
        output_grads[negative] = output_grads.get(negative, 0) + coeff * v

    return loss, {center: grad_v}, output_grads


def cbow_loss_grad(
    context: list[int],
    center: int,
    negatives: list[int],
    input_vectors: np.ndarray,
    output_vectors: np.ndarray,
) -> tuple[float, dict[int, np.ndarray], dict[int, np.ndarray]]:
    """CBOW counterpart: the mean of the context input vectors predicts the center."""
    mean = input_vectors[context].mean(axis=0)
    grad_mean = np.zeros_like(mean)
    output_grads: dict[int, np.ndarray] = {}

    score = float(np.dot(output_vectors[center], mean))
    loss = -_log_sigmoid(score)
    coeff = _sigmoid(score) - 1.0
    grad_mean += coeff * output_vectors[center]
    output_grads[center] = output_grads.get(center, 0) + coeff * mean

    for negative in negatives:
        score = float(np.dot(output_vectors[negative], mean))
        loss -= _log_sigmoid(-score)
        coeff = _sigmoid(score)
        grad_mean += coeff * output_vectors[negative]
        output_grads[negative] = output_grads.get(negative, 0) + coeff * mean

    share = grad_mean / len(context)
    input_grads: dict[int, np.ndarray] = {}
    for idx in context:
        input_grads[idx] = input_grads.get(idx, 0) + share
    return loss, input_grads, output_grads


class NegativeSampler:
    """Draws term ids from the unigram distribution raised to the 0.75 power."""

    def __init__(self, frequencies: np.ndarray, rng: np.random.Generator):
        weights = np.power(frequencies.astype(np.float64), NEGATIVE_EXPONENT)
        total = weights.sum()
        if total <= 0:
            raise DataError("negative sampler needs at least one positive frequency")
        self.probabilities = weights / total
        self.cumulative = np.cumsum(self.probabilities)
        self.rng = rng

    def draw(self, k: int) -> np.ndarray:
        points = self.rng.random(k)
        return np.searchsorted(self.cumulative, points, side="right")


def _stream_to_ids(stream: Iterable[str], vocabulary: Vocabulary) -> list[list[int]]:
    lines = []
    for line in stream:
        ids = [
            vocabulary.id_of(token) for token in line.split() if token in vocabulary
        ]
        if ids:
            lines.append(ids)
    return lines


def train(
    stream: list[str],
    config: TrainingConfig,
    head_pos: Optional[dict[str, str]] = None,
) -> TermVectorModel:
    """Train a term vector model; deterministic for a fixed seed."""
    config.validate()
    vocabulary = build_vocab(stream, config.min_count, head_pos)
    lines = _stream_to_ids(stream, vocabulary)
    if not lines:
        raise DataError("empty training stream")

    rng = np.random.default_rng(config.seed)
    size = len(vocabulary)
    input_vectors = rng.uniform(
        -INIT_SCALE / config.dim, INIT_SCALE / config.dim, size=(size, config.dim)
    )
    output_vectors = np.zeros((size, config.dim), dtype=np.float64)

    frequencies = vocabulary.frequencies_by_id()
    sampler = NegativeSampler(frequencies, rng)
    total_tokens = sum(len(line) for line in lines)
    planned = config.epochs * total_tokens
    lr0 = config.initial_learning_rate
    lr_floor = lr0 * LR_FLOOR_FRACTION

    keep_probability = None
    if config.subsample_threshold is not None:
        threshold_count = config.subsample_threshold * total_tokens
        ratio = frequencies / threshold_count
        with np.errstate(divide="ignore"):
            keep_probability = np.minimum((np.sqrt(ratio) + 1) / ratio, 1.0)

    processed = 0
    epoch_losses: list[float] = []
    for _epoch in range(config.epochs):
        loss_sum = 0.0
        pair_count = 0
        for line in lines:
            if keep_probability is not None:
                kept = [w for w in line if rng.random() < keep_probability[w]]
            else:
                kept = line
            for t, center in enumerate(kept):
                progress = processed / planned
                lr = max(lr_floor, lr0 * (1.0 - progress))
                processed += 1
                b = int(rng.integers(1, config.window + 1))
                lo = max(0, t - b)
                hi = min(len(kept), t + b + 1)
                context = [kept[j] for j in range(lo, hi) if j != t]
                if not context:
                    continue
                if config.algorithm == SGNS:
                    for ctx in context:
                        negatives = [
                            int(n) for n in sampler.draw(config.negatives) if n != ctx
                        ]
                        loss, grads_in, grads_out = pair_loss_grad(
                            center, ctx, negatives, input_vectors, output_vectors
                        )
                        _apply(input_vectors, output_vectors, grads_in, grads_out, lr)
                        loss_sum += loss
                        pair_count += 1
                else:
                    negatives = [
                        int(n) for n in sampler.draw(config.negatives) if n != center
                    ]
                    loss, grads_in, grads_out = cbow_loss_grad(
                        context, center, negatives, input_vectors, output_vectors
                    )
                    _apply(input_vectors, output_vectors, grads_in, grads_out, lr)
                    loss_sum += loss
                    pair_count += 1
                if not np.isfinite(loss_sum):
                    raise DataError(
                        f"training diverged: non-finite loss at token {processed}"
                    )
        epoch_losses.append(loss_sum / max(pair_count, 1))

    return TermVectorModel(
        vocabulary=vocabulary,
        input_vectors=input_vectors,
        output_vectors=output_vectors,
        dim=config.dim,
        config=config,
        epoch_losses=epoch_losses,
    )


def _apply(input_vectors, output_vectors, grads_in, grads_out, lr) -> None:
    for idx, grad in grads_in.items():
        input_vectors[idx] -= lr * grad
    for idx, grad in grads_out.items():
        output_vectors[idx] -= lr * grad


def char_ngrams(word: str, minn: int, maxn: int) -> list[str]:
    """fastText-style character n-grams of the boundary-wrapped word, then the
    full wrapped token. minn = maxn = 0 turns n-grams off."""
    wrapped = f"<{word}>"
    if minn == 0 and maxn == 0:
        return [wrapped]
    if not 1 <= minn <= maxn:
        raise ConfigError(f"need 1 <= minn <= maxn (or 0/0 to disable), got {minn}/{maxn}")
    grams = []
    for n in range(minn, maxn + 1):
        grams.extend(wrapped[i : i + n] for i in range(0, len(wrapped) - n + 1))
    grams.append(wrapped)
    return grams
