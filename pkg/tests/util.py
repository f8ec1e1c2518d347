"""Shared helpers for the test suite."""

from __future__ import annotations

import random

from covermech.instances import Graph, Ownership, VCInstance


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return Graph.from_edges(n, edges)


def unit_single_owner(g: Graph, costs=None) -> VCInstance:
    """One agent per node; unit costs unless given."""
    own = Ownership(sets=tuple((u,) for u in range(g.n)))
    if costs is None:
        costs = [1.0] * g.n
    return VCInstance(graph=g, ownership=own, costs=tuple((float(c),) for c in costs))


def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, k) for k in range(1, leaves + 1)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(k, (k + 1) % n) for k in range(n)])
