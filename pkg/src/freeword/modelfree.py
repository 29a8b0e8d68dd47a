"""Typicality of sequence sets without an automaton.

Each set is shuffled and concatenated into one long sequence, whose rate is
estimated as mean symbol weight plus an LZ78 entropy estimate; a set is
typical when its rate is within epsilon of the mean rate over all sets.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

Sequence_ = tuple  # tuple of symbol names


@dataclass(frozen=True)
class SequenceSet:
    id: str
    sequences: tuple[Sequence_, ...]

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(tuple(s) for s in self.sequences))
        if not self.sequences:
            raise ValueError(f"sequence set {self.id!r} is empty")

    def check_symbols(self, table: Mapping[str, float]) -> None:
        for k, seq in enumerate(self.sequences):
            for a in seq:
                if a not in table:
                    raise ValueError(f"set {self.id!r}, sequence {k}: unknown symbol {a!r}")

    def content_key(self) -> int:
        """Order-independent 64-bit digest of the set's contents."""
        blob = json.dumps(sorted(self.sequences)).encode()
        return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little")


def assign_ids(count: int, rng: np.random.Generator) -> list[int]:
    """A random bijection onto ids 1..count (Fisher-Yates via numpy)."""
    return (rng.permutation(count) + 1).tolist()


def concat_by_ids(sequences: Sequence[Sequence[str]], ids: Sequence[int]) -> Sequence_:
    """Concatenate so that the sequence with id 1 comes first, then id 2, ..."""
    if sorted(ids) != list(range(1, len(sequences) + 1)):
        raise ValueError("ids must be a permutation of 1..len(sequences)")
    ordered = [None] * len(sequences)
    for seq, i in zip(sequences, ids):
        ordered[i - 1] = seq
    return tuple(a for seq in ordered for a in seq)


def concat_set(seqset: SequenceSet, seed: int) -> Sequence_:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), seqset.content_key()])))
    return concat_by_ids(seqset.sequences, assign_ids(len(seqset.sequences), rng))


def mean_weight(beta: Sequence[str], table: Mapping[str, float]) -> float:
    """Average symbol weight, sum_a w(a) #(a) / |beta|."""
    if not beta:
        raise ValueError("empty sequence")
    return math.fsum(table[a] for a in beta) / len(beta)


def lz78_phrase_count(beta: Sequence) -> int:
    """Number of phrases in the LZ78 incremental parse (an unfinished tail counts)."""
    trie: dict = {}
    node = trie
    count = 0
    for a in beta:
        nxt = node.get(a)
        if nxt is None:
            node[a] = {}
            count += 1
            node = trie
        else:
            node = nxt
    if node is not trie:
        count += 1
    return count


def lz78_entropy(beta: Sequence, alphabet_size: int | None = None) -> float:
    """Entropy rate estimate c ln c / n in nats per symbol, clamped to [0, ln |alphabet|].

    ``alphabet_size`` defaults to the number of distinct symbols in ``beta``.
    """
    n = len(beta)
    if n < 2:
        raise ValueError("need at least two symbols")
    c = lz78_phrase_count(beta)
    k = alphabet_size if alphabet_size is not None else len(set(beta))
    estimate = c * math.log(c) / n
    return min(max(estimate, 0.0), math.log(k) if k > 1 else 0.0)


@dataclass(frozen=True)
class SetEstimate:
    id: str
    length: int
    mean_weight: float
    entropy: float
    rate: float
    typical: bool


@dataclass(frozen=True)
class DetectionReport:
    sets: list[SetEstimate]
    mean_rate: float
    epsilon: float

    def verdicts(self) -> dict[str, bool]:
        return {s.id: s.typical for s in self.sets}

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "mean_rate": self.mean_rate,
            "sets": [
                {
                    "id": s.id,
                    "length": s.length,
                    "mean_weight": s.mean_weight,
                    "entropy": s.entropy,
                    "rate": s.rate,
                    "deviation": s.rate - self.mean_rate,
                    "typical": s.typical,
                }
                for s in self.sets
            ],
        }


def detect(sets: Sequence[SequenceSet], table: Mapping[str, float], epsilon: float, seed: int = 0) -> DetectionReport:
    """Flag sets whose estimated rate strays at least epsilon from the mean.

    Each set's shuffle is seeded from ``seed`` and the set's contents, so the
    verdicts do not depend on set order or ids.
    """
    if len(sets) < 2:
        raise ValueError("detection needs at least two sets")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    rows = []
    for s in sets:
        s.check_symbols(table)
        beta = concat_set(s, seed)
        mw = mean_weight(beta, table)
        h = lz78_entropy(beta, len(set(beta)))
        rows.append((s.id, len(beta), mw, h, mw + h))
    mean = math.fsum(r[4] for r in rows) / len(rows)
    estimates = [SetEstimate(i, n, mw, h, lam, abs(mean - lam) < epsilon) for i, n, mw, h, lam in rows]
    return DetectionReport(estimates, mean, epsilon)
