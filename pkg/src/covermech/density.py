"""Subgraph density and orientations.

The density of a graph is max over nonempty node sets S of |E[S]| / |S|.
It is computed exactly (as a Fraction) by Dinkelbach iteration on a flow
network, and it equals the smallest achievable maximum indegree of any edge
orientation, rounded up.  The orientation routine realizes that optimum by
reversing paths from overloaded nodes.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CovermechError
from .flows import exact_max_flow
from .instances import Graph

__all__ = [
    "max_subgraph_density",
    "densest_subgraph",
    "orient_minimizing_indegree",
    "sparsity_gamma",
    "orient_min_max_indegree",
]


def densest_subgraph(g: Graph) -> tuple[Fraction, frozenset[int]]:
    """Exact maximum density and a witness node set (empty when no edges)."""
    m = g.m
    if m == 0:
        return Fraction(0), frozenset()
    nodes = g.nodes_with_edges()
    guess = Fraction(m, len(nodes))
    witness = frozenset(nodes)
    # network layout: 0 = source, 1..m edge nodes, then vertex nodes, last = sink
    vid = {u: 1 + m + i for i, u in enumerate(nodes)}
    sink = 1 + m + len(nodes)
    big = Fraction(2 * m + 1)
    while True:
        arcs: list[tuple[int, int, object]] = []
        for i, (u, v) in enumerate(g.edges):
            arcs.append((0, 1 + i, Fraction(1)))
            arcs.append((1 + i, vid[u], big))
            arcs.append((1 + i, vid[v], big))
        for u in nodes:
            arcs.append((vid[u], sink, guess))
        cut_value, reach = exact_max_flow(sink + 1, arcs, 0, sink)
        surplus = Fraction(m) - cut_value  # = max over S of |E[S]| - guess * |S|
        candidate = frozenset(u for u in nodes if reach[vid[u]])
        if surplus <= 0 or not candidate:
            return guess, witness
        inside = sum(1 for u, v in g.edges if u in candidate and v in candidate)
        better = Fraction(inside, len(candidate))
        if better <= guess:
            return guess, witness
        guess = better
        witness = candidate


def max_subgraph_density(g: Graph) -> Fraction:
    return densest_subgraph(g)[0]


def orient_minimizing_indegree(g: Graph) -> dict[tuple[int, int], int]:
    """Orient every edge so the maximum indegree is exactly ceil(density).

    Returns {edge: head}.  Starts from an arbitrary orientation and repeatedly
    reverses a path from an overloaded node back to a node with spare
    indegree; such a path always exists below the density bound.
    """
    gamma = max_subgraph_density(g)
    k = -(-gamma.numerator // gamma.denominator)  # ceil
    heads = {e: e[1] for e in g.edges}
    incoming: list[set[tuple[int, int]]] = [set() for _ in range(g.n)]
    for e, h in heads.items():
        incoming[h].add(e)

    def overloaded() -> int:
        for u in range(g.n):
            if len(incoming[u]) > k:
                return u
        return -1

    while True:
        w = overloaded()
        if w < 0:
            break
        # BFS backwards: from a node, step to tails of its incoming arcs
        parent: dict[int, tuple[int, tuple[int, int]]] = {}
        seen = {w}
        queue = [w]
        target = -1
        qi = 0
        while qi < len(queue) and target < 0:
            cur = queue[qi]
            qi += 1
            for e in sorted(incoming[cur]):
                tail = e[0] if heads[e] == e[1] else e[1]
                if tail in seen:
                    continue
                seen.add(tail)
                parent[tail] = (cur, e)
                if len(incoming[tail]) < k:
                    target = tail
                    break
                queue.append(tail)
        if target < 0:
            raise CovermechError(
                "no path to a node with spare indegree; density bound violated"
            )
        node = target
        while node != w:
            nxt, e = parent[node]
            # arc currently node -> nxt; reverse it
            incoming[nxt].discard(e)
            incoming[node].add(e)
            heads[e] = node
            node = nxt
    return heads


# Interface aliases: gamma is the everywhere-sparsity constant, and the
# orientation with smallest possible maximum indegree realizes ceil(gamma).
sparsity_gamma = max_subgraph_density
orient_min_max_indegree = orient_minimizing_indegree
