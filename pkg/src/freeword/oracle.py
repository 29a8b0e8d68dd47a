"""Brute-force ground truth for the spectral code.

Weighted word counts come from a transfer-matrix dynamic program run in
logs, one vector-matrix step per length. Enumeration lists accepted words
outright for very short lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .automata import WeightedDfa
from .errors import EnumerationOverflow
from .spectral import logsumexp

ENUMERATION_LIMIT = 1_000_000
MAX_ENUMERATION_LENGTH = 12


@dataclass(frozen=True)
class WeightedCountTable:
    """``log_counts[n-1] = ln S_n`` for n = 1..n_max (``-inf`` when no word has length n)."""

    log_counts: np.ndarray
    period_bound: int

    @property
    def n_max(self) -> int:
        return len(self.log_counts)

    def log_count(self, n: int) -> float:
        return float(self.log_counts[n - 1])

    def count(self, n: int) -> float:
        return math.exp(self.log_count(n))


def weighted_counts(dfa: WeightedDfa, n_max: int) -> WeightedCountTable:
    """ln of the sum of e^{w(word)} over accepted words of each length 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    k = len(dfa.states)
    log_w = np.full((k, k), -np.inf)
    for p, a, q in dfa.transition_list():
        i, j = dfa.index(p), dfa.index(q)
        log_w[i, j] = np.logaddexp(log_w[i, j], dfa.symbols[a])
    final = np.array([dfa.index(q) for q in dfa.accepting], dtype=int)
    x = np.full(k, -np.inf)
    x[dfa.index(dfa.initial)] = 0.0
    out = np.empty(n_max)
    for n in range(n_max):
        x = logsumexp(x[:, None] + log_w, axis=0)
        out[n] = logsumexp(x[final]) if len(final) else -np.inf
    return WeightedCountTable(out, max(k, 1))


@dataclass(frozen=True)
class RateEstimate:
    plain: float
    smoothed: float
    n_max: int

    @property
    def finite_language(self) -> bool:
        return self.plain == -math.inf and self.smoothed == -math.inf


def rate_estimate(table: WeightedCountTable) -> RateEstimate:
    """(1/n) ln S_n at n_max, plus a smoothed limsup estimate.

    The smoothed value sums S over the ``period_bound`` lengths ending at each
    n in the last tenth of the table, so periodic zeros cannot hide the
    growth, and takes the largest resulting (1/n) ln. A finite language gives
    ``-inf`` for both.
    """
    n_max = table.n_max
    if n_max < 100:
        raise ValueError("rate estimation needs n_max >= 100")
    lc = table.log_counts
    plain_rate = lc[-1] / n_max if np.isfinite(lc[-1]) else -math.inf
    p = table.period_bound
    start = max(p, n_max - n_max // 10)
    best = -math.inf
    for n in range(start, n_max + 1):
        window = logsumexp(lc[n - p : n])
        if np.isfinite(window):
            best = max(best, float(window) / n)
    return RateEstimate(float(plain_rate), best, n_max)


def enumerate_words(dfa: WeightedDfa, max_len: int) -> list[tuple[str, ...]]:
    """Every accepted word of length 1..max_len, shortest first, then lexicographic."""
    if not 1 <= max_len <= MAX_ENUMERATION_LENGTH:
        raise ValueError(f"max_len must be in 1..{MAX_ENUMERATION_LENGTH}")
    words = []
    frontier = [((), dfa.initial)]
    for _ in range(max_len):
        frontier = [(w + (a,), q) for w, s in frontier for a, q in sorted(dfa.out(s))]
        words.extend(w for w, q in frontier if q in dfa.accepting)
        if len(words) > ENUMERATION_LIMIT or len(frontier) > ENUMERATION_LIMIT:
            raise EnumerationOverflow(f"more than {ENUMERATION_LIMIT} words up to length {max_len}")
    return words


def enumerated_log_counts(dfa: WeightedDfa, max_len: int) -> list[float]:
    """ln S_n for n = 1..max_len summed over enumerated words."""
    by_len: list[list[float]] = [[] for _ in range(max_len)]
    for word in enumerate_words(dfa, max_len):
        by_len[len(word) - 1].append(dfa.word_weight(word))
    return [float(logsumexp(np.array(ws))) if ws else -math.inf for ws in by_len]
