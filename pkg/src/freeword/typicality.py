"""Free-energy rates of individual walks and epsilon-typicality.

For a walk ``t_1..t_n`` the rate is ``sum(w(t_i) - ln p(t_i)) / n``. Rates
come in two units: per graph edge (``edge``) and per emitted DFA symbol
(``symbol``); a split transition is two edges but one symbol. Verdicts use a
closed band, ``|rate - reference| <= epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MaxAttemptsExceeded, WordRejected, ZeroProbabilityEdge
from .sampling import Cluster, Walk, Walker, make_rng, make_walk, split_on_separators, walk_symbols
from .spectral import GurevichChain, ProbabilisticDfa

UNITS = ("edge", "symbol")


@dataclass(frozen=True)
class TypicalityVerdict:
    item: object
    lambda_alpha: float
    reference_rate: float
    epsilon: float
    typical: bool
    boundary_term: float
    unit: str

    def to_json(self) -> dict:
        return {
            "item": self.item,
            "lambda_alpha": self.lambda_alpha,
            "reference_rate": self.reference_rate,
            "deviation": self.lambda_alpha - self.reference_rate,
            "epsilon": self.epsilon,
            "typical": self.typical,
            "boundary_term": self.boundary_term,
            "unit": self.unit,
        }


def _steps(walk: Walk, unit: str) -> int:
    if unit == "edge":
        return len(walk.edges)
    if unit == "symbol":
        return walk.symbol_count
    raise ValueError(f"unit must be one of {UNITS}, got {unit!r}")


def walk_rate(walk: Walk, unit: str = "edge") -> float:
    if not walk.edges:
        raise ValueError("empty walk has no rate")
    if not math.isfinite(walk.logprob_sum):
        raise ZeroProbabilityEdge("walk takes an edge of probability zero")
    return (walk.weight_sum - walk.logprob_sum) / _steps(walk, unit)


def reference_rate(chain: GurevichChain, unit: str = "edge") -> float:
    return chain.rate_per_edge if unit == "edge" else chain.rate_per_symbol


def is_typical(walk: Walk, chain: GurevichChain, epsilon: float, unit: str = "edge", item=None) -> TypicalityVerdict:
    lam = walk_rate(walk, unit)
    ref = reference_rate(chain, unit)
    boundary = float(chain.log_v[walk.start] - chain.log_v[walk.end]) / _steps(walk, unit)
    return TypicalityVerdict(item, lam, ref, epsilon, bool(abs(lam - ref) <= epsilon), boundary, unit)


# -- typical clusters ---------------------------------------------------


@dataclass(frozen=True)
class TypicalCluster:
    cluster: Cluster
    walk: Walk
    verdict: TypicalityVerdict
    attempts: int


def typical_cluster(chain: GurevichChain, epsilon: float, length: int, seed: int, max_attempts: int = 1000) -> TypicalCluster:
    """Rejection-sample initial walks of ``length`` edges until one is typical."""
    graph = chain.graph
    rng = make_rng(seed)
    walker = Walker(chain)
    start = graph.initial_node
    rates = []
    for attempt in range(1, max_attempts + 1):
        walk = walker.walk(start, length, rng)
        verdict = is_typical(walk, chain, epsilon)
        if verdict.typical:
            cluster = split_on_separators(walk_symbols(graph, walk), graph.aug.base, walk)
            return TypicalCluster(cluster, walk, verdict, attempt)
        rates.append(verdict.lambda_alpha)
    raise MaxAttemptsExceeded(max_attempts, rates)


def cluster_walk(chain: GurevichChain, words: Sequence[Sequence[str]], separator: str = "heart") -> Walk:
    """Closed initial walk spelling each cluster member followed by a separator.

    ``separator`` is ``heart`` (<heart><>) or ``club`` (<club><spade><>).
    """
    from .automata import CLUB, DIAMOND, HEART, SPADE

    sep = (HEART, DIAMOND) if separator == "heart" else (CLUB, SPADE, DIAMOND)
    symbols: list[str] = []
    for w in words:
        symbols.extend(w)
        symbols.extend(sep)
    return word_walk(chain, symbols)


def word_walk(chain: GurevichChain, word: Sequence[str], index: int = 0) -> Walk:
    """The walk on ``chain.graph`` that spells ``word`` from the initial node."""
    graph = chain.graph
    dfa = graph.aug.dfa
    by_transition = {}
    for k, e in enumerate(graph.edges):
        by_transition.setdefault(e.transition, []).append(k)
    state = dfa.initial
    edges: list[int] = []
    for pos, a in enumerate(word):
        nxt = dfa.step(state, a)
        if nxt is None:
            raise WordRejected(index, pos, a)
        edges.extend(by_transition[(state, a, nxt)])
        state = nxt
    return make_walk(graph, chain, graph.initial_node, edges)


# -- AEP diagnostics ----------------------------------------------------


@dataclass(frozen=True)
class AepCheck:
    empirical_mean: float
    rate: float
    deviation: float
    std_error: float
    samples: int | None


def aep_expectation_check(chain: GurevichChain, n: int, samples: int | None = None, seed: int = 0) -> AepCheck:
    """Mean walk rate over length-``n`` walks started from the stationary law.

    With ``samples=None`` the expectation is computed by enumerating every
    walk of length ``n`` (small ``n`` only); otherwise by Monte Carlo.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    graph = chain.graph
    if samples is None:
        if n > 6:
            raise ValueError("exhaustive expectation is limited to n <= 6")
        total = 0.0
        w = [e.weight for e in graph.edges]
        lp = chain.edge_logp
        for start in range(graph.n):
            frontier = [(start, 0.0, chain.log_pi[start])]
            for _ in range(n):
                frontier = [
                    (graph.edges[k].dst, acc + w[k] - lp[k], logprob + lp[k])
                    for node, acc, logprob in frontier
                    for k in graph.out_edges(node)
                ]
            total += math.fsum(math.exp(logprob) * acc / n for _, acc, logprob in frontier)
        return AepCheck(total, chain.rate_per_edge, total - chain.rate_per_edge, 0.0, None)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = make_rng(seed)
    walker = Walker(chain)
    cum = np.cumsum(chain.stationary)
    cum[-1] = 1.0
    starts = np.searchsorted(cum, 1.0 - rng.random(samples), side="left")
    rates = np.array([walk_rate(walker.walk(int(s), n, rng)) for s in starts])
    mean = float(rates.mean())
    std_err = float(rates.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return AepCheck(mean, chain.rate_per_edge, mean - chain.rate_per_edge, std_err, samples)


# -- test suites --------------------------------------------------------


@dataclass(frozen=True)
class SuiteReport:
    verdicts: list[TypicalityVerdict]
    branch_coverage: float
    covered: int
    transitions: int
    epsilon: float
    unit: str
    reference_rate: float
    variant: str = field(default="")

    @property
    def n_typical(self) -> int:
        return sum(v.typical for v in self.verdicts)

    @property
    def n_nontypical(self) -> int:
        return len(self.verdicts) - self.n_typical

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "unit": self.unit,
            "epsilon": self.epsilon,
            "reference_rate": self.reference_rate,
            "branch_coverage": self.branch_coverage,
            "covered_transitions": self.covered,
            "total_transitions": self.transitions,
            "typical": self.n_typical,
            "nontypical": self.n_nontypical,
            "verdicts": [v.to_json() for v in self.verdicts],
        }


def evaluate_suite(pdfa: ProbabilisticDfa, suite: Sequence[Sequence[str]], epsilon: float, unit: str = "symbol") -> SuiteReport:
    """Typicality of every test word plus branch coverage of the base DFA."""
    if unit not in UNITS:
        raise ValueError(f"unit must be one of {UNITS}, got {unit!r}")
    chain = pdfa.chain
    base = pdfa.aug.base
    exercised: set[tuple[str, str, str]] = set()
    verdicts = []
    for i, word in enumerate(suite):
        word = tuple(word)
        state = base.initial
        for pos, a in enumerate(word):
            nxt = base.step(state, a)
            if nxt is None:
                raise WordRejected(i, pos, a)
            exercised.add((state, a, nxt))
            state = nxt
        if not word or state not in base.accepting:
            raise WordRejected(i, len(word))
        walk = word_walk(chain, word, i)
        verdicts.append(is_typical(walk, chain, epsilon, unit, item=" ".join(word)))
    total = len(base.transitions)
    coverage = len(exercised) / total if total else 0.0
    return SuiteReport(verdicts, coverage, len(exercised), total, epsilon, unit, reference_rate(chain, unit), pdfa.aug.variant)
