"""Seeded random words and walks drawn from a Gurevich chain.

Randomness comes from numpy's PCG64 generator, whose streams are fixed by
the seed on every platform. Each draw is mapped to ``r in (0, 1]`` and picks
the first cumulative bucket with ``cum[j-1] < r <= cum[j]``, so a transition
of probability zero can never be taken.
"""

from __future__ import annotations

import bisect
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .automata import RESERVED, WeightedDfa
from .construction import FINAL_STATE, SECOND, SplitGraph
from .errors import MaxAttemptsExceeded, MaxLengthExceeded, UncompletableTail
from .spectral import GurevichChain, ProbabilisticDfa

Word = tuple


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(int(seed)))


def unit_draws(rng: np.random.Generator) -> Iterator[float]:
    """Endless stream of draws in (0, 1]."""
    while True:
        for u in rng.random(1024):
            yield 1.0 - float(u)


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    min_length: int = 1
    max_length: int | None = None
    epsilon: float = 0.1
    max_attempts: int = 1000

    def __post_init__(self):
        if self.min_length < 1:
            raise ValueError("min_length must be positive")
        if self.max_length is not None and self.max_length < self.min_length:
            raise ValueError("max_length must be at least min_length")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")

    @property
    def length_cap(self) -> int:
        return self.max_length if self.max_length is not None else 100 * self.min_length


class CumulativeTable:
    """Cumulative probabilities over the outgoing choices of one state or node."""

    def __init__(self, choices: Sequence, probs: Sequence[float]):
        self.choices = list(choices)
        cum = np.cumsum(np.asarray(probs, dtype=float)).tolist()
        if cum:
            # absorb rounding so that r = 1.0 always lands in a bucket
            last = max(j for j, p in enumerate(probs) if p > 0)
            for j in range(last, len(cum)):
                cum[j] = 1.0
        self.cum = cum

    def pick(self, r: float):
        return self.choices[bisect.bisect_left(self.cum, r)]


def cumulative_tables(pdfa: ProbabilisticDfa) -> dict[str, CumulativeTable]:
    tables = {}
    for state in pdfa.dfa.states:
        out = pdfa.out(state)
        tables[state] = CumulativeTable([(a, q) for a, q, _ in out], [p for _, _, p in out])
    return tables


def sample_word(pdfa: ProbabilisticDfa, cfg: SamplerConfig, draws: Iterable[float] | None = None) -> Word:
    """Run the probabilistic automaton from its initial state.

    Stops at the first moment the current state is accepting and more than
    ``cfg.min_length`` symbols have been emitted. ``draws`` replaces the
    seeded generator with an explicit stream of numbers in (0, 1].
    """
    stream = iter(draws) if draws is not None else unit_draws(make_rng(cfg.seed))
    return _walk_word(pdfa, cumulative_tables(pdfa), cfg, stream)


def sample_words(pdfa: ProbabilisticDfa, cfg: SamplerConfig, count: int) -> list[Word]:
    """``count`` consecutive words from a single seeded stream."""
    stream = unit_draws(make_rng(cfg.seed))
    tables = cumulative_tables(pdfa)
    return [_walk_word(pdfa, tables, cfg, stream) for _ in range(count)]


def _walk_word(pdfa, tables, cfg, stream) -> Word:
    dfa = pdfa.dfa
    state = dfa.initial
    out = []
    cap = cfg.length_cap
    while True:
        a, state = tables[state].pick(next(stream))
        out.append(a)
        if state in dfa.accepting and len(out) > cfg.min_length:
            return tuple(out)
        if len(out) >= cap:
            raise MaxLengthExceeded(f"no accepting stop within {cap} symbols")


# -- clusters -----------------------------------------------------------


@dataclass(frozen=True)
class Walk:
    """Edge sequence on a graph with accumulated weight and log-probability."""

    start: int
    end: int
    edges: tuple[int, ...]
    weight_sum: float
    logprob_sum: float
    symbol_count: int

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Cluster:
    words: tuple[Word, ...]
    source_walk: Walk | None = None
    completed_tail: bool = False


def completion(dfa: WeightedDfa, state: str) -> Word:
    """Shortest (then lexicographically first) path from ``state`` to acceptance."""
    if state in dfa.accepting:
        return ()
    seen = {state: ()}
    queue = deque([state])
    while queue:
        s = queue.popleft()
        for a, t in dfa.out(s):
            if t in seen:
                continue
            path = seen[s] + (a,)
            if t in dfa.accepting:
                return path
            seen[t] = path
            queue.append(t)
    raise UncompletableTail(f"no accepting state reachable from {state!r}")


def split_on_separators(word: Sequence[str], base: WeightedDfa, walk: Walk | None = None) -> Cluster:
    """Cut an augmented-alphabet word at the separator symbols.

    Every segment must be a word of ``base``; a final segment that is not yet
    accepted (the walk stopped mid-word) is extended by :func:`completion`.
    """
    segments: list[list[str]] = [[]]
    for a in word:
        if a in RESERVED:
            if segments[-1]:
                segments.append([])
        else:
            segments[-1].append(a)
    trailing_open = bool(word) and word[-1] not in RESERVED
    segments = [s for s in segments if s]
    words = []
    completed = False
    for k, seg in enumerate(segments):
        end = base.run(seg)
        if end is None:
            raise ValueError(f"segment {k} is not a path of the automaton: {seg}")
        if end not in base.accepting:
            if k != len(segments) - 1 or not trailing_open:
                raise ValueError(f"segment {k} is not accepted: {seg}")
            seg = seg + list(completion(base, end))
            completed = True
        words.append(tuple(seg))
    return Cluster(tuple(words), walk, completed)


# -- walks on the graph -------------------------------------------------


class Walker:
    """Per-node cumulative tables over the out-edges of a chain's graph."""

    def __init__(self, chain: GurevichChain):
        self.chain = chain
        graph = chain.graph
        probs = chain.edge_probs
        self.tables = [CumulativeTable(list(graph.out_edges(i)), [probs[k] for k in graph.out_edges(i)]) for i in range(graph.n)]
        self.dst = [e.dst for e in graph.edges]
        self.weight = [e.weight for e in graph.edges]
        self.logp = chain.edge_logp.tolist()
        self.emits = [e.kind != SECOND for e in graph.edges]
        self.emits_base = [e.kind != SECOND and e.symbol not in RESERVED for e in graph.edges]

    def walk(self, start: int, length: int, rng: np.random.Generator) -> Walk:
        node = start
        edges = []
        dst, tables = self.dst, self.tables
        for r in (1.0 - rng.random(length)).tolist():
            k = tables[node].pick(r)
            edges.append(k)
            node = dst[k]
        return make_walk(self.chain.graph, self.chain, start, edges)


def make_walk(graph: SplitGraph, chain: GurevichChain, start: int, edges: Sequence[int]) -> Walk:
    """Walk from explicit edges; weights from ``graph``, probabilities from ``chain``.

    ``graph`` and ``chain.graph`` must share their edge list up to weights.
    """
    if len(graph.edges) != len(chain.graph.edges):
        raise ValueError("graph and chain have different edge sets")
    node = start
    wsum = 0.0
    symbols = 0
    logp = chain.edge_logp
    for k in edges:
        e = graph.edges[k]
        if e.src != node:
            raise ValueError(f"edge {k} does not start at node {node}")
        wsum += e.weight
        symbols += e.kind != SECOND
        node = e.dst
    lsum = float(np.sum(logp[list(edges)])) if len(edges) else 0.0
    return Walk(start, node, tuple(int(k) for k in edges), wsum, lsum, symbols)


def sample_walk(chain: GurevichChain, start: int, length: int, seed: int | np.random.Generator) -> Walk:
    if length < 1:
        raise ValueError("walk length must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    return Walker(chain).walk(start, length, rng)


def walk_symbols(graph: SplitGraph, walk: Walk) -> Word:
    """The augmented-alphabet word spelled by a walk."""
    return tuple(graph.edges[k].symbol for k in walk.edges if graph.edges[k].kind != SECOND)


def sample_prefix_closed_typical(chain: GurevichChain, cfg: SamplerConfig, length: int | None = None):
    """Long typical word of a prefix-closed language.

    Walks from the initial node of the aperiodic graph; hitting ``<F>``
    restarts the walk, and a walk that reaches ``length`` symbols is returned
    when it is typical (per edge, within ``cfg.epsilon``), else restarted.
    Returns ``(word, walk, attempts)``.
    """
    from .typicality import is_typical

    graph = chain.graph
    aug = graph.aug
    if aug.variant != "aperiodic":
        raise ValueError("prefix-closed generation needs the aperiodic construction")
    if not set(aug.base.transitions.values()) <= set(aug.base.accepting):
        raise ValueError("language is not prefix-closed: every state entered by a transition must accept")
    target = cfg.min_length if length is None else length
    rng = make_rng(cfg.seed)
    walker = Walker(chain)
    final = graph.node(FINAL_STATE)
    start = graph.initial_node
    rates = []
    for attempt in range(1, cfg.max_attempts + 1):
        node = start
        edges = []
        symbols = 0
        hit_final = False
        while symbols < target:
            k = walker.tables[node].pick(1.0 - rng.random())
            edges.append(k)
            symbols += walker.emits_base[k]
            node = walker.dst[k]
            if node == final:
                hit_final = True
                break
        if hit_final:
            continue
        walk = make_walk(graph, chain, start, edges)
        verdict = is_typical(walk, chain, cfg.epsilon)
        rates.append(verdict.lambda_alpha)
        if verdict.typical:
            word = tuple(a for a in walk_symbols(graph, walk) if a not in RESERVED)
            return word, walk, attempt
    raise MaxAttemptsExceeded(cfg.max_attempts, rates)
