"""Perron eigenpairs, Parry (Gurevich) chains and free-energy rates.

All matrices are kept in the log domain: ``L[i, j] = log W[i, j]`` with
``-inf`` for missing edges. A weight of ``-1000`` therefore stays ``-1000``
instead of underflowing to zero, and probabilities such as ``e^-1000`` are
exact internally; only the linear-scale views clamp them to 0.

The eigen solver is power iteration on the shifted matrix ``W + sI``. Before
iterating, the matrix is diagonally rescaled with max-plus potentials (Karp's
maximum cycle mean) so that its entries are at most 1 and its spectral radius
lies in ``[1, n]``; the shift ``s`` is then the largest rescaled entry. The
iteration is accelerated by repeated squaring, so ``k`` squarings apply the
``2**k``-th power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import graphs
from .construction import FIRST, SECOND, UNSPLIT, AugmentedDfa, SplitGraph, dfa_graph
from .errors import NoConvergence, NonPositiveEigenvector

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 200_000
_MAX_SQUARINGS = 96
REPORT_FLOOR = 1e-300


# -- log-domain linear algebra ------------------------------------------


def logsumexp(a: np.ndarray, axis=None) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    m = np.max(a, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m_safe), axis=axis, keepdims=True)) + m_safe
    out = np.where(np.isneginf(m), -np.inf, out)
    if axis is None:
        return out.reshape(())[()]
    return np.squeeze(out, axis=axis)


def log_matvec(L: np.ndarray, x: np.ndarray) -> np.ndarray:
    return logsumexp(L + x[None, :], axis=1)


def log_matmul(A: np.ndarray, B: np.ndarray, chunk: int = 64) -> np.ndarray:
    n = A.shape[0]
    out = np.empty((n, B.shape[1]))
    for lo in range(0, n, chunk):
        block = A[lo : lo + chunk, :, None] + B[None, :, :]
        out[lo : lo + chunk] = logsumexp(block, axis=1)
    return out


def _log(W: np.ndarray) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if np.any(W < 0) or not np.all(np.isfinite(W)):
        raise ValueError("weight matrix entries must be finite and nonnegative")
    with np.errstate(divide="ignore"):
        return np.log(W)


# -- balancing ----------------------------------------------------------


def max_cycle_mean(L: np.ndarray) -> float:
    """Karp's maximum mean cycle weight of a strongly connected log-matrix."""
    n = L.shape[0]
    D = np.full((n + 1, n), -np.inf)
    D[0, 0] = 0.0
    for k in range(1, n + 1):
        D[k] = np.max(D[k - 1][:, None] + L, axis=0)
    best = -np.inf
    for v in range(n):
        if not np.isfinite(D[n, v]):
            continue
        worst = np.inf
        for k in range(n):
            if np.isfinite(D[k, v]):
                worst = min(worst, (D[n, v] - D[k, v]) / (n - k))
        best = max(best, worst)
    return float(best)


def _potentials(L: np.ndarray, mu: float) -> np.ndarray:
    """Longest-path potentials h with L_ij - mu + h_j <= h_i (no positive cycles)."""
    n = L.shape[0]
    h = np.zeros(n)
    R = L - mu
    for _ in range(n):
        new = np.maximum(0.0, np.max(R + h[None, :], axis=1))
        if np.array_equal(new, h):
            break
        h = new
    return h


# -- Perron eigenpair ---------------------------------------------------


def _residual(B: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    r = log_matvec(B, x) - x
    lo, hi = float(np.min(r)), float(np.max(r))
    log_rho = 0.5 * (lo + hi)
    return log_rho, float(np.expm1(0.5 * (hi - lo)))


def log_perron(L: np.ndarray, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> tuple[float, np.ndarray, float]:
    """Perron root and right eigenvector of ``exp(L)``, in logs.

    Returns ``(log_lambda, log_v, residual)`` where ``log_v`` is normalized to
    max 0 and ``residual`` bounds ``|(Wv)_i / (lambda v_i) - 1|`` for every i.
    ``max_iters`` bounds the number of matrix products (squarings included).
    """
    L = np.asarray(L, dtype=float)
    n = L.shape[0]
    if L.shape != (n, n) or n == 0:
        raise ValueError("expected a nonempty square matrix")
    if np.any(np.isnan(L)) or np.any(L == np.inf):
        raise ValueError("log weights must be finite or -inf")
    adj = [list(np.flatnonzero(np.isfinite(L[i]))) for i in range(n)]
    if not graphs.is_strongly_connected(adj):
        raise NonPositiveEigenvector("matrix is reducible; the Perron vector is not strictly positive")

    mu = max_cycle_mean(L)
    h = _potentials(L, mu)
    B = L - mu - h[:, None] + h[None, :]
    shift = float(np.max(B[np.isfinite(B)]))
    S = B.copy()
    S[np.diag_indices(n)] = np.logaddexp(np.diag(B), shift)

    x = np.zeros(n)
    log_rho, res = _residual(B, x)
    iters = 0
    X = S
    while res > tol and iters < max_iters and iters < _MAX_SQUARINGS:
        cand = logsumexp(X, axis=1)
        cand = cand - cand.max()
        iters += 1
        c_rho, c_res = _residual(B, cand)
        if c_res < res:
            x, log_rho, res = cand, c_rho, c_res
        if res <= tol:
            break
        X = log_matmul(X, X)
        X = X - np.max(X)
    while res > tol and iters < max_iters:
        x = log_matvec(S, x)
        x = x - x.max()
        iters += 1
        log_rho, res = _residual(B, x)
    if res > tol:
        raise NoConvergence(max_iters, res)
    if not np.all(np.isfinite(x)):
        raise NonPositiveEigenvector("eigenvector has zero entries")
    log_v = x + h
    return mu + log_rho, log_v - log_v.max(), res


def perron_eigenpair(W: np.ndarray, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> tuple[float, np.ndarray]:
    """Perron number and max-normalized positive right eigenvector of a linear-scale matrix."""
    log_lam, log_v, _ = log_perron(_log(W), tol, max_iters)
    return math.exp(log_lam), np.exp(log_v)


# -- chains -------------------------------------------------------------


def _node_log_matrix(graph: SplitGraph, edge_logp: np.ndarray) -> np.ndarray:
    P = np.full((graph.n, graph.n), -np.inf)
    for k, e in enumerate(graph.edges):
        P[e.src, e.dst] = np.logaddexp(P[e.src, e.dst], edge_logp[k])
    return P


def log_stationary(graph: SplitGraph, edge_logp: np.ndarray, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> np.ndarray:
    """log of the stationary distribution: left Perron vector of P, summing to 1."""
    P = _node_log_matrix(graph, edge_logp)
    _, log_u, _ = log_perron(P.T, tol, max_iters)
    return log_u - logsumexp(log_u)


def _edge_sources(graph: SplitGraph) -> np.ndarray:
    return np.array([e.src for e in graph.edges], dtype=int)


@dataclass(frozen=True)
class GurevichChain:
    """Parry measure of a strongly connected weighted graph.

    Everything is stored in logs; the linear-scale properties clamp values
    below 1e-300 to zero.
    """

    graph: SplitGraph
    log_perron: float
    log_v: np.ndarray
    edge_logp: np.ndarray
    log_pi: np.ndarray
    residual: float
    _sym_mass: float = field(default=float("nan"), repr=False)

    @property
    def perron(self) -> float:
        return math.exp(self.log_perron)

    @property
    def right_eigenvector(self) -> np.ndarray:
        return _clamp(np.exp(self.log_v))

    @property
    def edge_probs(self) -> np.ndarray:
        return _clamp(np.exp(self.edge_logp))

    @property
    def stationary(self) -> np.ndarray:
        return _clamp(np.exp(self.log_pi))

    @property
    def transition_matrix(self) -> np.ndarray:
        return _clamp(np.exp(_node_log_matrix(self.graph, self.edge_logp)))

    @property
    def rate_per_edge(self) -> float:
        return self.log_perron

    @property
    def symbol_fraction(self) -> float:
        """Stationary fraction of steps that emit a DFA symbol."""
        if self.graph.fully_split:
            return 0.5
        if self.graph.unsplit_only:
            return 1.0
        return self._sym_mass

    @property
    def rate_per_symbol(self) -> float:
        if self.graph.fully_split:
            return 2.0 * self.log_perron
        if self.graph.unsplit_only:
            return self.log_perron
        return self.log_perron / self._sym_mass

    def edge_flow(self) -> np.ndarray:
        """pi(src) * P(edge) for every edge."""
        return np.exp(self.log_pi[_edge_sources(self.graph)] + self.edge_logp)


def _clamp(a: np.ndarray) -> np.ndarray:
    return np.where(a < REPORT_FLOOR, 0.0, a)


def parry_chain(graph: SplitGraph, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> GurevichChain:
    """Run the Gurevich construction: P_ij = W_ij v_j / (lambda v_i), per edge."""
    log_lam, log_v, res = log_perron(graph.log_weight_matrix(), tol, max_iters)
    src = _edge_sources(graph)
    dst = np.array([e.dst for e in graph.edges], dtype=int)
    w = np.array([e.weight for e in graph.edges])
    edge_logp = w + log_v[dst] - log_v[src] - log_lam
    # a node with a single out-edge must carry probability exactly 1
    for i in range(graph.n):
        out = graph.out_edges(i)
        if len(out) == 1:
            edge_logp[out[0]] = 0.0
    log_pi = log_stationary(graph, edge_logp, tol, max_iters)
    emits = np.array([e.kind != SECOND for e in graph.edges])
    flow = np.exp(log_pi[src] + edge_logp)
    sym_mass = float(np.sum(flow[emits]) / np.sum(flow))
    return GurevichChain(graph, log_lam, log_v, edge_logp, log_pi, res, sym_mass)


def stationary_distribution(chain: GurevichChain, tol: float = DEFAULT_TOL) -> np.ndarray:
    return np.exp(log_stationary(chain.graph, chain.edge_logp, tol))


@dataclass(frozen=True)
class ProbabilisticDfa:
    """The augmented DFA with a probability on every transition."""

    aug: AugmentedDfa
    chain: GurevichChain
    log_probs: dict  # (p, a, q) -> log probability

    @property
    def dfa(self):
        return self.aug.dfa

    def prob(self, p: str, a: str, q: str | None = None) -> float:
        if q is None:
            q = self.aug.dfa.transitions[(p, a)]
        lp = self.log_probs[(p, a, q)]
        return 0.0 if lp < math.log(REPORT_FLOOR) else math.exp(lp)

    def out(self, state: str) -> list[tuple[str, str, float]]:
        """``(symbol, target, probability)`` in canonical symbol order."""
        return [(a, q, self.prob(state, a, q)) for a, q in self.aug.dfa.out(state)]

    def row_sums(self) -> dict[str, float]:
        return {s: sum(math.exp(self.log_probs[(s, a, q)]) for a, q in self.aug.dfa.out(s)) for s in self.aug.dfa.states}

    @property
    def rate_per_symbol(self) -> float:
        return self.chain.rate_per_symbol

    def to_json(self) -> dict:
        return {
            "transitions": [[p, a, q, self.prob(p, a, q)] for p, a, q in self.aug.dfa.transition_list()],
        }


def project_to_dfa(chain: GurevichChain) -> ProbabilisticDfa:
    """Label each DFA transition with the probability of its first (or only) edge."""
    log_probs = {}
    for k, e in enumerate(chain.graph.edges):
        if e.kind in (FIRST, UNSPLIT):
            log_probs[e.transition] = float(chain.edge_logp[k])
    return ProbabilisticDfa(chain.graph.aug, chain, log_probs)


def dfa_level_chain(aug: AugmentedDfa, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> GurevichChain:
    """Parry chain on the unsplit DFA multigraph (W[p][q] = sum_a e^w(a))."""
    return parry_chain(dfa_graph(aug), tol, max_iters)


def variational_check(chain: GurevichChain) -> tuple[float, float, float]:
    """(mean weight, entropy, |mean weight + entropy - rate per edge|) under pi."""
    mean_weight, entropy = walk_energy(chain.graph, chain.edge_logp, chain.log_pi)
    return mean_weight, entropy, abs(mean_weight + entropy - chain.rate_per_edge)


def walk_energy(graph: SplitGraph, edge_logp: np.ndarray, log_pi: np.ndarray | None = None) -> tuple[float, float]:
    """Stationary mean weight and entropy per step of an arbitrary chain on ``graph``."""
    if log_pi is None:
        log_pi = log_stationary(graph, edge_logp)
    flow = np.exp(log_pi[_edge_sources(graph)] + edge_logp)
    w = np.array([e.weight for e in graph.edges])
    mean_weight = float(np.sum(flow * w))
    entropy = float(-np.sum(flow * edge_logp))
    return mean_weight, entropy


def uniform_edge_logp(graph: SplitGraph) -> np.ndarray:
    """Log-probabilities of the chain that picks every out-edge uniformly."""
    out = np.array([len(graph.out_edges(e.src)) for e in graph.edges], dtype=float)
    return -np.log(out)


def build(dfa, variant: str = "diamond", w_diamond: float = -1000.0, tol: float = DEFAULT_TOL):
    """Convenience pipeline: augment, split, Parry chain, projection."""
    from .construction import augment, split

    aug = augment(dfa, variant, w_diamond)
    chain = parry_chain(split(aug), tol)
    return chain, project_to_dfa(chain)
