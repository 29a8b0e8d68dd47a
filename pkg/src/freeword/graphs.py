"""Small digraph helpers: Tarjan SCCs, reachability, and cycle-length gcd.

Graphs are given as adjacency lists over dense integer nodes ``0..n-1``.
"""

from __future__ import annotations

from collections import deque
from math import gcd
from typing import Sequence


def tarjan_scc(adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components, iterative Tarjan.

    Components come out in reverse topological order of the condensation.
    """
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def reachable(adj: Sequence[Sequence[int]], sources: Sequence[int]) -> set[int]:
    seen = set(sources)
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def reverse(adj: Sequence[Sequence[int]]) -> list[list[int]]:
    radj: list[list[int]] = [[] for _ in adj]
    for v, targets in enumerate(adj):
        for w in targets:
            radj[w].append(v)
    return radj


def is_strongly_connected(adj: Sequence[Sequence[int]]) -> bool:
    n = len(adj)
    if n == 0:
        return False
    if len(reachable(adj, [0])) != n:
        return False
    # a single node needs a self-loop to carry any cycle at all
    if n == 1:
        return 0 in adj[0]
    return len(reachable(reverse(adj), [0])) == n


def period(adj: Sequence[Sequence[int]]) -> int:
    """gcd of all cycle lengths of a strongly connected graph.

    BFS levels from node 0; every edge u->v contributes level[u] + 1 - level[v].
    Returns 0 when the graph has no cycle.
    """
    level = {0: 0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in level:
                level[w] = level[v] + 1
                queue.append(w)
    g = 0
    for v, targets in enumerate(adj):
        if v not in level:
            continue
        for w in targets:
            if w in level:
                g = gcd(g, abs(level[v] + 1 - level[w]))
    return g


def structure(adj: Sequence[Sequence[int]]) -> tuple[bool, bool]:
    """(strongly_connected, aperiodic); aperiodicity is reported False off an SCC."""
    if not is_strongly_connected(adj):
        return False, False
    return True, period(adj) == 1
