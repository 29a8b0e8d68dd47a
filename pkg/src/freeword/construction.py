"""From a weighted DFA to the strongly connected weighted graph used by the spectral code.

Two augmentations are provided:

* ``diamond``: every accepting state gets a ``<>`` transition back to the
  initial state.
* ``aperiodic``: a fresh accepting sink ``<F>`` reached from each accepting
  state by ``<heart>`` (one step) or ``<club><spade>`` (two steps), with a
  single ``<>`` transition from ``<F>`` back to the initial state. Because the
  two detours differ in length by one, the graph is aperiodic.

``plain`` wraps a DFA that is already strongly connected without adding
anything. :func:`split` then replaces each transition ``p -a-> q`` by
``p -> p·a·q -> q`` (weights ``w(a)`` and ``0``), except for the edges the
aperiodic construction added, which stay single edges.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import graphs
from .automata import CLUB, DIAMOND, HEART, SPADE, WeightedDfa
from .errors import NotStronglyConnected

DEFAULT_DIAMOND_WEIGHT = -1000.0
FINAL_STATE = "<F>"

FIRST, SECOND, UNSPLIT = "first", "second", "unsplit"


class WeakDiamondWeight(UserWarning):
    """w(<>) is not far below the smallest symbol weight."""


def club_state(q: str) -> str:
    return f"<club:{q}>"


@dataclass(frozen=True)
class AugmentedDfa:
    base: WeightedDfa
    variant: str  # "diamond" | "aperiodic" | "plain"
    dfa: WeightedDfa
    diamond_weight: float | None
    added_states: frozenset[str] = frozenset()
    added_transitions: tuple[tuple[str, str, str], ...] = ()

    @property
    def initial(self) -> str:
        return self.base.initial


def _check_diamond_weight(dfa: WeightedDfa, w_diamond: float) -> None:
    if not math.isfinite(w_diamond):
        raise ValueError("the <> weight must be finite")
    used = {a for (_, a) in dfa.transitions}
    wmin = min((dfa.symbols[a] for a in used), default=0.0)
    if w_diamond > wmin - 20:
        warnings.warn(
            f"w(<>)={w_diamond} is within 20 of the minimal weight {wmin}; the augmented rate may differ noticeably",
            WeakDiamondWeight,
            stacklevel=3,
        )


def add_diamond(dfa: WeightedDfa, w_diamond: float = DEFAULT_DIAMOND_WEIGHT) -> AugmentedDfa:
    _check_diamond_weight(dfa, w_diamond)
    symbols = dict(dfa.symbols)
    symbols[DIAMOND] = float(w_diamond)
    trans = dict(dfa.transitions)
    added = []
    for q in dfa.states:
        if q in dfa.accepting:
            trans[(q, DIAMOND)] = dfa.initial
            added.append((q, DIAMOND, dfa.initial))
    aug = WeightedDfa(symbols, dfa.states, dfa.initial, dfa.accepting, trans)
    return AugmentedDfa(dfa, "diamond", aug, float(w_diamond), frozenset(), tuple(added))


def make_aperiodic(dfa: WeightedDfa, w_diamond: float = DEFAULT_DIAMOND_WEIGHT) -> AugmentedDfa:
    _check_diamond_weight(dfa, w_diamond)
    symbols = dict(dfa.symbols)
    symbols.update({CLUB: 0.0, SPADE: 0.0, HEART: 0.0, DIAMOND: float(w_diamond)})
    trans = dict(dfa.transitions)
    states = list(dfa.states)
    added_states = [FINAL_STATE]
    added = []
    for q in dfa.states:
        if q not in dfa.accepting:
            continue
        c = club_state(q)
        states.append(c)
        added_states.append(c)
        for t in ((q, CLUB, c), (c, SPADE, FINAL_STATE), (q, HEART, FINAL_STATE)):
            trans[(t[0], t[1])] = t[2]
            added.append(t)
    states.append(FINAL_STATE)
    trans[(FINAL_STATE, DIAMOND)] = dfa.initial
    added.append((FINAL_STATE, DIAMOND, dfa.initial))
    aug = WeightedDfa(symbols, tuple(states), dfa.initial, frozenset([FINAL_STATE]), trans)
    return AugmentedDfa(dfa, "aperiodic", aug, float(w_diamond), frozenset(added_states), tuple(added))


def plain(dfa: WeightedDfa) -> AugmentedDfa:
    """Wrap an already strongly connected DFA without augmentation."""
    if not graphs.is_strongly_connected(dfa.adjacency()):
        raise NotStronglyConnected("plain variant requires a strongly connected DFA")
    return AugmentedDfa(dfa, "plain", dfa, None)


def augment(dfa: WeightedDfa, variant: str = "diamond", w_diamond: float = DEFAULT_DIAMOND_WEIGHT) -> AugmentedDfa:
    if variant == "diamond":
        return add_diamond(dfa, w_diamond)
    if variant == "aperiodic":
        return make_aperiodic(dfa, w_diamond)
    if variant == "plain":
        return plain(dfa)
    if variant == "auto":
        sc, ap = graphs.structure(dfa.adjacency())
        return plain(dfa) if sc and ap else make_aperiodic(dfa, w_diamond)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    weight: float
    kind: str  # first | second | unsplit
    transition: tuple[str, str, str]

    @property
    def symbol(self) -> str | None:
        """The DFA symbol this edge emits when walked (None for second halves)."""
        return None if self.kind == SECOND else self.transition[1]


@dataclass(frozen=True)
class SplitGraph:
    """Weighted digraph (parallel edges allowed) with provenance to DFA transitions."""

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    aug: AugmentedDfa
    _out: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        out: list[list[int]] = [[] for _ in self.nodes]
        for k, e in enumerate(self.edges):
            out[e.src].append(k)
        object.__setattr__(self, "_out", tuple(tuple(o) for o in out))
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.nodes)})

    @property
    def n(self) -> int:
        return len(self.nodes)

    def node(self, name: str) -> int:
        return self._index[name]

    def out_edges(self, i: int) -> tuple[int, ...]:
        return self._out[i]

    @property
    def initial_node(self) -> int:
        return self._index[self.aug.initial]

    def adjacency(self) -> list[list[int]]:
        return [sorted({self.edges[k].dst for k in out}) for out in self._out]

    @property
    def fully_split(self) -> bool:
        return all(e.kind != UNSPLIT for e in self.edges)

    @property
    def unsplit_only(self) -> bool:
        return all(e.kind == UNSPLIT for e in self.edges)

    def log_weight_matrix(self) -> np.ndarray:
        """log W with -inf where there is no edge; parallel edges add up."""
        m = np.full((self.n, self.n), -np.inf)
        for e in self.edges:
            m[e.src, e.dst] = np.logaddexp(m[e.src, e.dst], e.weight)
        return m

    def structure(self) -> tuple[bool, bool]:
        return graphs.structure(self.adjacency())

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [
                {
                    "from": self.nodes[e.src],
                    "to": self.nodes[e.dst],
                    "weight": e.weight,
                    "provenance": {FIRST: "FirstHalf", SECOND: "SecondHalf", UNSPLIT: "Unsplit"}[e.kind],
                    "transition": list(e.transition),
                }
                for e in self.edges
            ],
        }


def transition_node(p: str, a: str, q: str) -> str:
    return f"{p}·{a}·{q}"


def split(aug: AugmentedDfa) -> SplitGraph:
    dfa = aug.dfa
    if not graphs.is_strongly_connected(dfa.adjacency()):
        raise NotStronglyConnected("the augmented automaton is not strongly connected")
    keep_whole = set(aug.added_transitions) if aug.variant == "aperiodic" else set()
    nodes = list(dfa.states)
    index = {q: i for i, q in enumerate(nodes)}
    edges = []
    for t in dfa.transition_list():
        p, a, q = t
        w = dfa.symbols[a]
        if t in keep_whole:
            edges.append(Edge(index[p], index[q], w, UNSPLIT, t))
            continue
        mid = len(nodes)
        nodes.append(transition_node(p, a, q))
        edges.append(Edge(index[p], mid, w, FIRST, t))
        edges.append(Edge(mid, index[q], 0.0, SECOND, t))
    return SplitGraph(tuple(nodes), tuple(edges), aug)


def dfa_graph(aug: AugmentedDfa) -> SplitGraph:
    """The augmented DFA itself as a multigraph: one unsplit edge per transition."""
    dfa = aug.dfa
    if not graphs.is_strongly_connected(dfa.adjacency()):
        raise NotStronglyConnected("the augmented automaton is not strongly connected")
    index = {q: i for i, q in enumerate(dfa.states)}
    edges = tuple(Edge(index[p], index[q], dfa.symbols[a], UNSPLIT, (p, a, q)) for p, a, q in dfa.transition_list())
    return SplitGraph(tuple(dfa.states), edges, aug)


def collapse(graph: SplitGraph) -> dict[tuple[str, str, str], float]:
    """Recover the transition relation with weights from the edge provenance."""
    out: dict[tuple[str, str, str], float] = {}
    pending: dict[tuple[str, str, str], float] = {}
    for e in graph.edges:
        if e.kind == UNSPLIT:
            out[e.transition] = e.weight
        elif e.kind == FIRST:
            pending[e.transition] = e.weight
        else:
            out[e.transition] = pending.pop(e.transition) + e.weight
    if pending:
        raise ValueError(f"unpaired first halves: {sorted(pending)}")
    return out
