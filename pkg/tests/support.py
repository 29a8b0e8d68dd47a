"""Shared helpers for the test-suite: fixtures, random automata, a naive regex matcher."""

from __future__ import annotations

import math
from functools import lru_cache
from importlib.resources import files

import numpy as np

from freeword.automata import Concat, Literal, Optional_, Plus, Star, Union_, WeightedDfa, minimize, validate

FIXTURES = files("freeword") / "fixtures"

WEIGHTED_LAMBDA_DFA = (math.exp(-1) + math.sqrt(math.exp(-2) + 4 * math.exp(4))) / 2
GOLDEN_LOG = math.log((1 + math.sqrt(5)) / 2)


def weighted_example(weights=None) -> WeightedDfa:
    return WeightedDfa.from_json(_load("weighted_example.json"), weights)


def textbox(weights=None) -> WeightedDfa:
    return WeightedDfa.from_json(_load("textbox.json"), weights)


def suite(name: str) -> list[list[str]]:
    return [line.split() for line in (FIXTURES / f"{name}.txt").read_text().splitlines() if line.strip()]


def _load(name: str) -> dict:
    import json

    return json.loads((FIXTURES / name).read_text())


def random_dfa(rng: np.random.Generator, max_states: int = 8, alphabet: str = "abc", wlo: float = -3.0, whi: float = 3.0) -> WeightedDfa:
    """A cleaned, minimal DFA with random structure and weights."""
    while True:
        n = int(rng.integers(1, max_states + 1))
        symbols = {a: float(rng.uniform(wlo, whi)) for a in alphabet}
        names = [f"s{i}" for i in range(n)]
        trans = {}
        for p in names:
            for a in alphabet:
                if rng.random() < 0.6:
                    trans[(p, a)] = names[int(rng.integers(n))]
        accepting = [q for q in names if rng.random() < 0.4]
        if not accepting:
            continue
        try:
            dfa = minimize(WeightedDfa(symbols, names, names[0], accepting, trans))
        except Exception:
            continue
        if not validate(dfa):
            return dfa


# -- naive regex membership ---------------------------------------------


def matches(ast, word) -> bool:
    """Backtracking membership test straight from the AST (no automata)."""
    word = tuple(word)

    @lru_cache(maxsize=None)
    def ends(node_id: int, start: int) -> frozenset[int]:
        node = nodes[node_id]
        if isinstance(node, Literal):
            return frozenset([start + 1]) if start < len(word) and word[start] == node.symbol else frozenset()
        if isinstance(node, Concat):
            cur = {start}
            for part in node.parts:
                cur = {e for s in cur for e in ends(ids[id(part)], s)}
            return frozenset(cur)
        if isinstance(node, Union_):
            return frozenset().union(*(ends(ids[id(p)], start) for p in node.parts))
        if isinstance(node, (Star, Plus)):
            inner = ids[id(node.inner)]
            reached = set() if isinstance(node, Plus) else {start}
            frontier = set(ends(inner, start))
            while frontier - reached:
                new = frontier - reached
                reached |= new
                frontier = {e for s in new for e in ends(inner, s) if e > s}
            return frozenset(reached)
        if isinstance(node, Optional_):
            return frozenset({start}) | ends(ids[id(node.inner)], start)
        raise TypeError(node)

    nodes: list = []
    ids: dict = {}

    def index(node):
        ids[id(node)] = len(nodes)
        nodes.append(node)
        for child in getattr(node, "parts", ()):
            index(child)
        if hasattr(node, "inner"):
            index(node.inner)

    index(ast)
    return len(word) in ends(0, 0)
