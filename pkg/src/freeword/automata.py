"""Weighted deterministic finite automata.

A :class:`WeightedDfa` carries its own symbol table (symbol name -> weight).
Regular expressions are compiled through a Thompson NFA, the subset
construction, trimming and Moore partition refinement; the resulting minimal
DFA has states renamed ``q0, q1, ...`` in BFS order from the initial state so
that repeated compilations are byte-identical.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from . import graphs
from .errors import (
    EmptyLanguageError,
    InvalidDfaError,
    RegexSyntaxError,
    ReservedSymbolError,
    UnknownSymbolError,
)

DIAMOND = "<>"
CLUB = "<club>"
SPADE = "<spade>"
HEART = "<heart>"
RESERVED = (CLUB, SPADE, HEART, DIAMOND)

Word = tuple  # tuple of symbol names


class NullWordDropped(UserWarning):
    """The compiled expression accepted the null word; it was removed from L."""


def check_symbol_table(symbols: Mapping[str, float]) -> dict[str, float]:
    table = {}
    for name, weight in symbols.items():
        if not isinstance(name, str) or not name:
            raise InvalidDfaError(f"symbol names must be nonempty strings, got {name!r}")
        if name in RESERVED:
            raise ReservedSymbolError(f"symbol {name!r} is reserved")
        weight = float(weight)
        if not math.isfinite(weight):
            raise InvalidDfaError(f"weight of {name!r} is not finite")
        table[name] = weight
    return table


def symbol_order(name: str) -> tuple[int, str]:
    """Sort key: ordinary symbols lexicographically, then the separators."""
    if name in RESERVED:
        return (1, str(RESERVED.index(name)))
    return (0, name)


@dataclass(frozen=True)
class WeightedDfa:
    """Deterministic automaton whose symbols carry weights.

    ``transitions`` maps ``(state, symbol)`` to the target state and may be
    partial. Instances are treated as immutable.
    """

    symbols: Mapping[str, float]
    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    transitions: Mapping[tuple[str, str], str]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "symbols", dict(self.symbols))
        object.__setattr__(self, "transitions", dict(self.transitions))
        if len(set(self.states)) != len(self.states):
            raise InvalidDfaError("duplicate state names")
        index = {s: i for i, s in enumerate(self.states)}
        object.__setattr__(self, "_index", index)
        if self.initial not in index:
            raise InvalidDfaError(f"initial state {self.initial!r} is not a state")
        for q in self.accepting:
            if q not in index:
                raise InvalidDfaError(f"accepting state {q!r} is not a state")
        for (p, a), q in self.transitions.items():
            if p not in index or q not in index:
                raise InvalidDfaError(f"transition {p!r} -{a}-> {q!r} uses an unknown state")
            if a not in self.symbols:
                raise UnknownSymbolError(f"transition {p!r} -{a}-> {q!r} uses unknown symbol {a!r}")
        for name, w in self.symbols.items():
            if not math.isfinite(w):
                raise InvalidDfaError(f"weight of {name!r} is not finite")

    @property
    def alphabet(self) -> list[str]:
        return sorted(self.symbols, key=symbol_order)

    def index(self, state: str) -> int:
        return self._index[state]

    def weight(self, symbol: str) -> float:
        return self.symbols[symbol]

    def step(self, state: str, symbol: str) -> str | None:
        return self.transitions.get((state, symbol))

    def out(self, state: str) -> list[tuple[str, str]]:
        """Outgoing ``(symbol, target)`` pairs in canonical symbol order."""
        return [(a, self.transitions[(state, a)]) for a in self.alphabet if (state, a) in self.transitions]

    def transition_list(self) -> list[tuple[str, str, str]]:
        return [(p, a, q) for p in self.states for a, q in self.out(p)]

    def run(self, word: Iterable[str], start: str | None = None) -> str | None:
        state = self.initial if start is None else start
        for a in word:
            state = self.transitions.get((state, a))
            if state is None:
                return None
        return state

    def accepts(self, word: Sequence[str]) -> bool:
        if len(word) == 0:
            return False
        end = self.run(word)
        return end is not None and end in self.accepting

    def word_weight(self, word: Iterable[str]) -> float:
        return sum(self.symbols[a] for a in word)

    def with_weights(self, weights: Mapping[str, float]) -> "WeightedDfa":
        unknown = set(weights) - set(self.symbols)
        if unknown:
            raise UnknownSymbolError(f"weights given for unknown symbols {sorted(unknown)}")
        symbols = dict(self.symbols)
        symbols.update({k: float(v) for k, v in weights.items()})
        return WeightedDfa(symbols, self.states, self.initial, self.accepting, self.transitions)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.states]
        for (p, _), q in self.transitions.items():
            j = self._index[q]
            if j not in adj[self._index[p]]:
                adj[self._index[p]].append(j)
        return adj

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        return {
            "symbols": {a: self.symbols[a] for a in self.alphabet},
            "states": list(self.states),
            "initial": self.initial,
            "accepting": [q for q in self.states if q in self.accepting],
            "transitions": [list(t) for t in self.transition_list()],
        }

    @classmethod
    def from_json(cls, data: Mapping, weights: Mapping[str, float] | None = None) -> "WeightedDfa":
        try:
            symbols = check_symbol_table(data["symbols"])
            transitions = {}
            for p, a, q in data["transitions"]:
                if (p, a) in transitions and transitions[(p, a)] != q:
                    raise InvalidDfaError(f"nondeterministic transitions on ({p!r}, {a!r})")
                transitions[(p, a)] = q
            dfa = cls(symbols, tuple(data["states"]), data["initial"], frozenset(data["accepting"]), transitions)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDfaError(f"malformed DFA JSON: {exc}") from exc
        if weights is not None:
            dfa = dfa.with_weights(check_symbol_table(weights))
        return dfa

    @classmethod
    def load(cls, path, weights: Mapping[str, float] | None = None) -> "WeightedDfa":
        with open(path) as fh:
            return cls.from_json(json.load(fh), weights)


# -- validation ---------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # Unreachable | NotCoReachable | EmptyLanguage | OnlyNullWord
    subject: str

    def __str__(self) -> str:
        return f"{self.kind}({self.subject})"


def validate(dfa: WeightedDfa) -> list[Violation]:
    """Report every cleaned-DFA invariant that fails; empty list when clean."""
    adj = dfa.adjacency()
    init = dfa.index(dfa.initial)
    fwd = graphs.reachable(adj, [init])
    acc = [dfa.index(q) for q in dfa.accepting]
    bwd = graphs.reachable(graphs.reverse(adj), acc)
    out = []
    for i, q in enumerate(dfa.states):
        if i not in fwd:
            out.append(Violation("Unreachable", q))
        elif i not in bwd:
            out.append(Violation("NotCoReachable", q))
    if not (fwd & set(acc)):
        out.append(Violation("EmptyLanguage", dfa.initial))
    elif not _has_nonempty_word(dfa):
        out.append(Violation("OnlyNullWord", dfa.initial))
    return out


def _has_nonempty_word(dfa: WeightedDfa) -> bool:
    adj = dfa.adjacency()
    init = dfa.index(dfa.initial)
    after_one = {j for j in adj[init]}
    seen = graphs.reachable(adj, list(after_one)) if after_one else set()
    return any(dfa.index(q) in seen for q in dfa.accepting)


def structure_flags(dfa: WeightedDfa) -> tuple[bool, bool]:
    """(strongly_connected, aperiodic) of the transition digraph."""
    return graphs.structure(dfa.adjacency())


# -- regular expressions ------------------------------------------------


@dataclass(frozen=True)
class Literal:
    symbol: str


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Union_:
    parts: tuple


@dataclass(frozen=True)
class Star:
    inner: object


@dataclass(frozen=True)
class Plus:
    """One-or-more; not produced by the surface syntax (``+`` is union)."""

    inner: object


@dataclass(frozen=True)
class Optional_:
    inner: object


RegexAst = Union[Literal, Concat, Union_, Star, Plus, Optional_]

_SPECIAL = set("()+*?'")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c == "'":
            end = text.find("'", i + 1)
            if end == -1:
                raise RegexSyntaxError("unterminated quoted symbol", i)
            if end == i + 1:
                raise RegexSyntaxError("empty quoted symbol", i)
            tokens.append(("SYM", text[i + 1 : end], i))
            i = end + 1
        elif c in _SPECIAL:
            tokens.append((c, c, i))
            i += 1
        else:
            tokens.append(("SYM", c, i))
            i += 1
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: Mapping[str, float]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.symbols = symbols

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind: str):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise RegexSyntaxError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.pos += 1
        return tok

    def expr(self):
        parts = [self.term()]
        while self.peek()[0] == "+":
            self.pos += 1
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else Union_(tuple(parts))

    def term(self):
        parts = []
        while self.peek()[0] in ("SYM", "("):
            parts.append(self.factor())
        if not parts:
            tok = self.peek()
            raise RegexSyntaxError(f"expected a symbol or '(', found {tok[1] or 'end of input'!r}", tok[2])
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def factor(self):
        node = self.atom()
        kind = self.peek()[0]
        if kind == "*":
            self.pos += 1
            node = Star(node)
        elif kind == "?":
            self.pos += 1
            node = Optional_(node)
        return node

    def atom(self):
        kind, value, where = self.peek()
        if kind == "(":
            self.pos += 1
            node = self.expr()
            self.take(")")
            return node
        self.take("SYM")
        if value in RESERVED:
            raise ReservedSymbolError(f"symbol {value!r} is reserved (position {where})")
        if value not in self.symbols:
            raise UnknownSymbolError(f"unknown symbol {value!r} at position {where}")
        return Literal(value)


def parse_regex(text: str, symbols: Mapping[str, float]) -> RegexAst:
    """Parse ``expr := term ('+' term)*``, ``term := factor+``,
    ``factor := atom ('*'|'?')?``, ``atom := SYMBOL | '(' expr ')'``.

    Multi-character symbols are written in single quotes.
    """
    parser = _Parser(text, symbols)
    node = parser.expr()
    parser.take("EOF")
    return node


# -- Thompson NFA and subset construction -------------------------------


class _Nfa:
    def __init__(self):
        self.eps: list[list[int]] = []
        self.moves: list[list[tuple[str, int]]] = []

    def new(self) -> int:
        self.eps.append([])
        self.moves.append([])
        return len(self.eps) - 1

    def build(self, node) -> tuple[int, int]:
        if isinstance(node, Literal):
            s, t = self.new(), self.new()
            self.moves[s].append((node.symbol, t))
            return s, t
        if isinstance(node, Concat):
            start = end = self.new()  # an empty concatenation denotes the null word
            for part in node.parts:
                s, t = self.build(part)
                self.eps[end].append(s)
                end = t
            return start, end
        if isinstance(node, Union_):
            s, t = self.new(), self.new()
            for part in node.parts:
                a, b = self.build(part)
                self.eps[s].append(a)
                self.eps[b].append(t)
            return s, t
        if isinstance(node, (Star, Plus, Optional_)):
            s, t = self.new(), self.new()
            a, b = self.build(node.inner)
            self.eps[s].append(a)
            self.eps[b].append(t)
            if not isinstance(node, Optional_):
                self.eps[b].append(a)
            if not isinstance(node, Plus):
                self.eps[s].append(t)
            return s, t
        raise TypeError(f"not a regex node: {node!r}")

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        while stack:
            v = stack.pop()
            for w in self.eps[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)


def _determinize(ast: RegexAst, alphabet: list[str]):
    nfa = _Nfa()
    start, final = nfa.build(ast)
    d0 = nfa.closure([start])
    ids = {d0: 0}
    order = [d0]
    trans: dict[tuple[int, str], int] = {}
    queue = deque([d0])
    while queue:
        cur = queue.popleft()
        for a in alphabet:
            nxt = {t for v in cur for (b, t) in nfa.moves[v] if b == a}
            if not nxt:
                continue
            target = nfa.closure(nxt)
            if target not in ids:
                ids[target] = len(order)
                order.append(target)
                queue.append(target)
            trans[(ids[cur], a)] = ids[target]
    accepting = {i for i, s in enumerate(order) if final in s}
    return len(order), 0, accepting, trans


def _trim(n: int, initial: int, accepting: set[int], trans: dict) -> tuple[set[int], dict]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for (p, _), q in trans.items():
        adj[p].append(q)
    keep = graphs.reachable(adj, [initial]) & graphs.reachable(graphs.reverse(adj), list(accepting))
    return keep, {(p, a): q for (p, a), q in trans.items() if p in keep and q in keep}


def _minimal(n: int, initial: int, accepting: set[int], trans: dict, symbols: Mapping[str, float]) -> WeightedDfa:
    """Trim, merge equivalent states, and renumber in BFS order."""
    keep, trans = _trim(n, initial, accepting, trans)
    if initial not in keep:
        raise EmptyLanguageError("the expression denotes the empty language")
    alphabet = sorted(symbols, key=symbol_order)
    states = sorted(keep)
    block = {s: int(s in accepting) for s in states}
    nblocks = len(set(block.values()))
    while True:
        sigs = {}
        new_block = {}
        for s in states:
            sig = (block[s],) + tuple(block.get(trans.get((s, a)), -1) if (s, a) in trans else -1 for a in alphabet)
            new_block[s] = sigs.setdefault(sig, len(sigs))
        block = new_block
        if len(sigs) == nblocks:
            break
        nblocks = len(sigs)
    qtrans = {(block[p], a): block[q] for (p, a), q in trans.items()}
    qacc = {block[s] for s in states if s in accepting}
    # BFS renumbering
    start = block[initial]
    order = {start: 0}
    queue = deque([start])
    while queue:
        b = queue.popleft()
        for a in alphabet:
            t = qtrans.get((b, a))
            if t is not None and t not in order:
                order[t] = len(order)
                queue.append(t)
    name = {b: f"q{i}" for b, i in order.items()}
    return WeightedDfa(
        symbols,
        tuple(name[b] for b in sorted(order, key=order.get)),
        name[start],
        frozenset(name[b] for b in qacc),
        {(name[p], a): name[q] for (p, a), q in qtrans.items()},
    )


def compile_regex(ast: RegexAst, symbols: Mapping[str, float]) -> WeightedDfa:
    """Minimal, cleaned DFA for the language of ``ast`` minus the null word."""
    symbols = check_symbol_table(symbols)
    alphabet = sorted(symbols, key=symbol_order)
    n, initial, accepting, trans = _determinize(ast, alphabet)
    if initial in accepting:
        # fresh non-accepting copy of the initial state removes exactly the null word
        warnings.warn("expression accepts the null word; it is dropped from the language", NullWordDropped, stacklevel=2)
        fresh = n
        n += 1
        for a in alphabet:
            if (initial, a) in trans:
                trans[(fresh, a)] = trans[(initial, a)]
        initial = fresh
    if not accepting:
        raise EmptyLanguageError("the expression denotes the empty language")
    try:
        return _minimal(n, initial, accepting, trans, symbols)
    except EmptyLanguageError:
        raise EmptyLanguageError("the expression denotes only the null word") from None


def compile_text(text: str, symbols: Mapping[str, float]) -> WeightedDfa:
    symbols = check_symbol_table(symbols)
    return compile_regex(parse_regex(text, symbols), symbols)


def minimize(dfa: WeightedDfa) -> WeightedDfa:
    """Minimal equivalent DFA (trimmed, BFS-numbered ``q0..``)."""
    idx = {q: i for i, q in enumerate(dfa.states)}
    trans = {(idx[p], a): idx[q] for (p, a), q in dfa.transitions.items()}
    return _minimal(len(dfa.states), idx[dfa.initial], {idx[q] for q in dfa.accepting}, trans, dfa.symbols)
