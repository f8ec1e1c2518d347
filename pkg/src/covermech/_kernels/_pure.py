"""Pure-Python kernels.

Reference implementations of the hot combinatorial loops.  The Cython module
`_fast` mirrors this file operation for operation; both must produce bitwise
identical results (including tie-breaks and float accumulation order) so the
backend choice never changes package output.

Node sets are bitmasks over node ids < 64.  Ties between equal-cost covers are
broken toward the lexicographically smallest node set: the winner is the mask
containing the lowest differing node id.
"""

from __future__ import annotations

__all__ = [
    "min_cost_vertex_cover",
    "maximal_independent_sets",
    "max_weight_independent_set",
    "max_flow",
]


def _lex_better(a: int, b: int) -> bool:
    """True if mask a beats mask b as the lexicographically smaller node set."""
    diff = a ^ b
    if diff == 0:
        return False
    low = diff & -diff
    return bool(a & low)


def min_cost_vertex_cover(n: int, adj: list[int], costs: list[float]):
    """Cheapest vertex cover by branch and bound.

    Branches on the first edge whose endpoints are both undecided; excluding a
    node forces its undecided neighbors in.  The lower bound is the value of a
    greedy matching on uncovered edges.  Returns (mask, cost) with cost
    re-summed in ascending node order.
    """
    edges = []
    for u in range(n):
        mu = adj[u]
        v = u + 1
        while v < n:
            if mu >> v & 1:
                edges.append((u, v))
            v += 1
    best_mask = 0
    for u in range(n):
        best_mask |= 1 << u
    best_cost = 0.0
    for u in range(n):
        best_cost += costs[u]

    def matching_bound(in_mask: int, out_mask: int) -> float:
        used = in_mask | out_mask
        bound = 0.0
        for u, v in edges:
            if (used >> u & 1) == 0 and (used >> v & 1) == 0:
                used |= (1 << u) | (1 << v)
                cu = costs[u]
                cv = costs[v]
                bound += cu if cu < cv else cv
        return bound

    stack = [(0, 0, 0.0)]
    while stack:
        in_mask, out_mask, acc = stack.pop()
        if acc + matching_bound(in_mask, out_mask) > best_cost:
            continue
        pick = -1
        for u, v in edges:
            if (in_mask >> u & 1) == 0 and (in_mask >> v & 1) == 0:
                if (out_mask >> u & 1) == 0 and (out_mask >> v & 1) == 0:
                    pick = u
                    break
        if pick < 0:
            if acc < best_cost or (acc == best_cost and _lex_better(in_mask, best_mask)):
                best_cost = acc
                best_mask = in_mask
            continue
        # exclude pick: every undecided neighbor joins the cover
        forced = adj[pick] & ~in_mask & ~out_mask
        add_cost = 0.0
        w = 0
        fm = forced
        while fm:
            if fm & 1:
                add_cost += costs[w]
            fm >>= 1
            w += 1
        stack.append((in_mask | forced, out_mask | (1 << pick), acc + add_cost))
        # include pick
        stack.append((in_mask | (1 << pick), out_mask, acc + costs[pick]))

    total = 0.0
    for u in range(n):
        if best_mask >> u & 1:
            total += costs[u]
    return best_mask, total


def maximal_independent_sets(n: int, adj: list[int], limit: int) -> list[int]:
    """All maximal independent sets as masks (pivoting Bron-Kerbosch on the
    complement).  Raises RuntimeError when more than `limit` sets appear."""
    full = (1 << n) - 1
    nonadj = [full & ~adj[u] & ~(1 << u) for u in range(n)]
    out: list[int] = []

    def popcount_and(mask: int, other: int) -> int:
        return (mask & other).bit_count()

    stack = [(0, full, 0)]
    while stack:
        r, p, x = stack.pop()
        if p == 0 and x == 0:
            out.append(r)
            if len(out) > limit:
                raise RuntimeError("maximal independent set enumeration limit exceeded")
            continue
        pivot = -1
        pivot_deg = -1
        pm = p | x
        u = 0
        while pm:
            if pm & 1:
                d = popcount_and(p, nonadj[u])
                if d > pivot_deg:
                    pivot_deg = d
                    pivot = u
            pm >>= 1
            u += 1
        cand = p & ~nonadj[pivot]
        v = 0
        while cand:
            if cand & 1:
                bit = 1 << v
                stack.append((r | bit, p & nonadj[v], x & nonadj[v]))
                p &= ~bit
                x |= bit
            cand >>= 1
            v += 1
    out.sort()
    return out


def max_weight_independent_set(n: int, adj: list[int], weights: list[float]):
    """Maximum-weight independent set (weights nonnegative).

    Returns (mask, weight); the first optimum found in deterministic scan
    order wins ties.
    """
    full = (1 << n) - 1
    best_mask = 0
    best_w = 0.0

    def weight_of(mask: int) -> float:
        tot = 0.0
        u = 0
        while mask:
            if mask & 1:
                tot += weights[u]
            mask >>= 1
            u += 1
        return tot

    stack = [(0, full, 0.0)]
    while stack:
        r, p, acc = stack.pop()
        if p == 0:
            if acc > best_w:
                best_w = acc
                best_mask = r
            continue
        if acc + weight_of(p) <= best_w:
            continue
        v = (p & -p).bit_length() - 1
        bit = 1 << v
        stack.append((r, p & ~bit, acc))
        stack.append((r | bit, p & ~bit & ~adj[v], acc + weights[v]))
    return best_mask, best_w


def max_flow(n: int, arcs: list[tuple[int, int, float]], s: int, t: int):
    """Dinic max flow with float capacities.

    Returns (value, reach) where reach[u] says whether u is reachable from s
    in the final residual network (the canonical source-side minimum cut).
    """
    eps = 1e-12
    head = [[] for _ in range(n)]
    to: list[int] = []
    cap: list[float] = []
    for u, v, c in arcs:
        head[u].append(len(to))
        to.append(v)
        cap.append(float(c))
        head[v].append(len(to))
        to.append(u)
        cap.append(0.0)

    level = [0] * n
    it = [0] * n
    INF = float("inf")

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
                if cap[eid] > eps and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level[t] >= 0

    def dfs(u: int, pushed: float) -> float:
        if u == t:
            return pushed
        while it[u] < len(head[u]):
            eid = head[u][it[u]]
            v = to[eid]
            if cap[eid] > eps and level[v] == level[u] + 1:
                got = dfs(v, pushed if pushed < cap[eid] else cap[eid])
                if got > eps:
                    cap[eid] -= got
                    cap[eid ^ 1] += got
                    return got
            it[u] += 1
        return 0.0

    value = 0.0
    while bfs():
        for i in range(n):
            it[i] = 0
        while True:
            got = dfs(s, INF)
            if got <= eps:
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
            if cap[eid] > eps and not reach[v]:
                reach[v] = True
                queue.append(v)
    return value, reach
