"""Max-flow utilities.

Float networks go through the kernel backend; exact-arithmetic networks
(Fraction capacities) use a generic Dinic here, with exact zero tests, so
rational fixtures keep exact optima.
"""

from __future__ import annotations

from fractions import Fraction

from . import _kernels


def exact_max_flow(n: int, arcs: list[tuple[int, int, object]], s: int, t: int):
    """Dinic max flow with exact arithmetic; mirrors the kernel float version
    but compares against exact zero."""
    head: list[list[int]] = [[] for _ in range(n)]
    to: list[int] = []
    cap: list = []
    zero = Fraction(0)
    for u, v, c in arcs:
        head[u].append(len(to))
        to.append(v)
        cap.append(Fraction(c))
        head[v].append(len(to))
        to.append(u)
        cap.append(zero)

    level = [0] * n
    it = [0] * n

    def bfs() -> bool:
        for i in range(n):
            level[i] = -1
        level[s] = 0
        queue = [s]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for eid in head[u]:
                v = to[eid]
                if cap[eid] > zero and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level[t] >= 0

    def dfs(u: int, pushed):
        if u == t:
            return pushed
        while it[u] < len(head[u]):
            eid = head[u][it[u]]
            v = to[eid]
            if cap[eid] > zero and level[v] == level[u] + 1:
                got = dfs(v, pushed if pushed < cap[eid] else cap[eid])
                if got > zero:
                    cap[eid] -= got
                    cap[eid ^ 1] += got
                    return got
            it[u] += 1
        return zero

    value = zero
    total = sum((c for _, _, c in arcs), zero)
    while bfs():
        for i in range(n):
            it[i] = 0
        while True:
            got = dfs(s, total + 1)
            if got <= zero:
                break
            value += got

    reach = [False] * n
    reach[s] = True
    queue = [s]
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for eid in head[u]:
            v = to[eid]
            if cap[eid] > zero and not reach[v]:
                reach[v] = True
                queue.append(v)
    return value, reach


def solve_max_flow(n: int, arcs: list[tuple[int, int, object]], s: int, t: int):
    """Dispatch on capacity type: exact when any capacity is a Fraction."""
    if any(isinstance(c, Fraction) for _, _, c in arcs):
        return exact_max_flow(n, arcs, s, t)
    return _kernels.max_flow(n, arcs, s, t)
