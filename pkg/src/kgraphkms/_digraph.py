"""Boolean digraph primitives shared by the component and spectral layers."""

from __future__ import annotations

import numpy as np


def tarjan_sccs(succ: list[list[int]]) -> list[list[int]]:
    """Strongly connected components of a digraph given as successor lists.

    Iterative Tarjan; each component is returned as a sorted list of node
    indices. Output order is by discovery, callers re-order as needed.
    """
    n = len(succ)
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        # Explicit call stack of (node, iterator position).
        work = [(root, 0)]
        while work:
            node, pos = work.pop()
            if pos == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            recurse = False
            for i in range(pos, len(succ[node])):
                child = succ[node][i]
                if index[child] == -1:
                    work.append((node, i + 1))
                    work.append((child, 0))
                    recurse = True
                    break
                if on_stack[child]:
                    lowlink[node] = min(lowlink[node], index[child])
            if recurse:
                continue
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                components.append(sorted(comp))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return components


def succ_lists(adj: np.ndarray) -> list[list[int]]:
    """Successor lists of a boolean adjacency matrix (adj[v, w] = edge v -> w)."""
    return [list(np.flatnonzero(row)) for row in adj]


def transitive_closure(adj: np.ndarray) -> np.ndarray:
    """Closure under paths of length >= 1, by repeated boolean squaring."""
    n = adj.shape[0]
    reach = adj.astype(bool).copy()
    if n == 0:
        return reach
    while True:
        step = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
        grown = reach | step
        if np.array_equal(grown, reach):
            return grown
        reach = grown


def reflexive_transitive_closure(adj: np.ndarray) -> np.ndarray:
    """Closure under paths of length >= 0."""
    out = transitive_closure(adj)
    out = out.copy()
    np.fill_diagonal(out, True)
    return out


def weak_components(adj: np.ndarray) -> list[list[int]]:
    """Connected components ignoring edge direction, sorted by least node."""
    n = adj.shape[0]
    sym = adj | adj.T
    seen = [False] * n
    pieces: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        frontier = [start]
        seen[start] = True
        piece = []
        while frontier:
            v = frontier.pop()
            piece.append(v)
            for w in np.flatnonzero(sym[v]):
                if not seen[w]:
                    seen[w] = True
                    frontier.append(int(w))
        pieces.append(sorted(piece))
    pieces.sort(key=lambda p: p[0])
    return pieces


def is_strongly_connected(adj: np.ndarray) -> bool:
    if adj.shape[0] <= 1:
        return True
    return len(tarjan_sccs(succ_lists(adj))) == 1
