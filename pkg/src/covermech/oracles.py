"""Exact oracles and the half-integral vertex-cover LP solver.

The vertex-cover LP relaxation (min c.x subject to x_u + x_v >= 1 on edges,
0 <= x <= 1) always has a half-integral optimum.  It is solved combinatorially
through the bipartite double cover: each node splits into two copies, each
edge becomes two copy edges, and a minimum vertex cover of the double cover
(a min cut) halves back to an optimal LP solution.  Rational costs with small
denominators are solved exactly with Fractions, everything else in floats.

Among optimal half-integral solutions the solver returns the one that first
greedily minimizes the set of 1-valued coordinates in node order, then prefers
0 over 1/2 in node order.  Every choice is certified by an exact min-cut
feasibility probe, and a fast path skips the probes when the optimum is
unique.  The rule exists so selections and critical values are reproducible.
"""

from __future__ import annotations

from fractions import Fraction

from . import _kernels
from .errors import SizeLimitError
from .flows import solve_max_flow
from .instances import Graph, UFLInstance
from .lp import LinearProgram, solve_lp

__all__ = [
    "min_vertex_cover_exact",
    "enumerate_minimal_vertex_covers",
    "vc_lp_solve",
    "vc_lp_value",
    "vc_lp_restricted_value",
    "vc_lp_via_simplex",
    "ufl_exact",
]

EXACT_NODE_CAP = 24
MINIMAL_COVER_CAP = 10**6


def min_vertex_cover_exact(g: Graph, costs) -> tuple[frozenset[int], float]:
    """Cheapest vertex cover by branch and bound; ties resolve to the
    lexicographically smallest node set.  Capped at 24 nodes."""
    if g.n > EXACT_NODE_CAP:
        raise SizeLimitError(f"exact cover capped at {EXACT_NODE_CAP} nodes, got {g.n}")
    mask, cost = _kernels.min_cost_vertex_cover(
        g.n, list(g.neighbor_masks), [float(c) for c in costs]
    )
    return frozenset(u for u in range(g.n) if mask >> u & 1), cost


def enumerate_minimal_vertex_covers(g: Graph) -> list[frozenset[int]]:
    """All inclusion-minimal vertex covers (complements of maximal
    independent sets)."""
    if g.n > EXACT_NODE_CAP:
        raise SizeLimitError(f"cover enumeration capped at {EXACT_NODE_CAP} nodes, got {g.n}")
    try:
        sets = _kernels.maximal_independent_sets(
            g.n, list(g.neighbor_masks), MINIMAL_COVER_CAP
        )
    except RuntimeError as exc:
        raise SizeLimitError(str(exc)) from exc
    full = (1 << g.n) - 1
    out = []
    for mis in sets:
        comp = full & ~mis
        out.append(frozenset(u for u in range(g.n) if comp >> u & 1))
    return out


# ---------------------------------------------------------------------------
# half-integral LP solver


def _exact_costs(costs) -> list[Fraction] | None:
    out = []
    for c in costs:
        if isinstance(c, Fraction):
            f = c
        elif isinstance(c, (int, float)):
            f = Fraction(c)
        else:
            return None
        if f.denominator > 10**6:
            return None
        out.append(f)
    return out


class _DoubleCover:
    """Min-cut machinery on the bipartite double cover with copy forcing.

    Copies are numbered 0..2n-1: copy 2u is the left copy of node u, copy
    2u+1 the right.  A copy forced in joins the cover for free (its cost is
    added back to the value); a copy forced out gets an uncuttable capacity.
    """

    def __init__(self, g: Graph, costs, exact: bool):
        self.g = g
        self.exact = exact
        if exact:
            self.costs = [Fraction(c) for c in costs]
            self.zero = Fraction(0)
        else:
            self.costs = [float(c) for c in costs]
            self.zero = 0.0
        self.big = sum(self.costs, self.zero) * 2 + 1
        self.n = g.n
        self.src = 2 * g.n
        self.snk = 2 * g.n + 1

    def cut(self, forced_in=(), forced_out=()):
        """Returns (lp_value, reach, canreach) for the current forcing.

        reach marks copies on the source side of the source-minimal min cut;
        canreach marks copies that can still reach the sink (for the
        sink-minimal cut).  lp_value is half the adjusted cut value.
        """
        fin = set(forced_in)
        fout = set(forced_out)
        arcs = []
        base = self.zero
        for u in range(self.n):
            left, right = 2 * u, 2 * u + 1
            c = self.costs[u]
            if left in fin:
                base += c
                cl = self.zero
            elif left in fout:
                cl = self.big
            else:
                cl = c
            if right in fin:
                base += c
                cr = self.zero
            elif right in fout:
                cr = self.big
            else:
                cr = c
            arcs.append((self.src, left, cl))
            arcs.append((right, self.snk, cr))
        for u, v in self.g.edges:
            arcs.append((2 * u, 2 * v + 1, self.big))
            arcs.append((2 * v, 2 * u + 1, self.big))
        value, reach = solve_max_flow(self.snk + 1, arcs, self.src, self.snk)

        # sink-minimal cut: solve the arc-reversed network from the sink; its
        # source-side reach is the complement of the forward cut with the
        # largest source side
        rev = [(v, u, c) for (u, v, c) in arcs]
        _value2, reach_rev = solve_max_flow(self.snk + 1, rev, self.snk, self.src)
        lp_value = (value + base) / 2
        return lp_value, reach, reach_rev

    def cover_from_reach(self, reach, forced_in=(), forced_out=()):
        """Copies in the cover for the source-side cut described by reach."""
        fin = set(forced_in)
        fout = set(forced_out)
        cover = set()
        for u in range(self.n):
            left, right = 2 * u, 2 * u + 1
            if left in fin or (left not in fout and not reach[left]):
                cover.add(left)
            if right in fin or (right not in fout and reach[right]):
                cover.add(right)
        return cover


def _levels_from_cover(n: int, cover: set[int]):
    levels = []
    for u in range(n):
        levels.append((1 if 2 * u in cover else 0) + (1 if 2 * u + 1 in cover else 0))
    return levels  # per node: 0, 1 (=1/2) or 2 (=1)


def vc_lp_solve(g: Graph, costs):
    """Optimal half-integral solution of the vertex-cover LP relaxation.

    Returns a tuple of per-node values (Fractions in exact mode, floats
    otherwise) in {0, 1/2, 1}.
    """
    exact_costs = _exact_costs(costs)
    exact = exact_costs is not None
    dc = _DoubleCover(g, exact_costs if exact else costs, exact)
    value, reach, reach_rev = dc.cut()
    cover_min = dc.cover_from_reach(reach)
    # mirrored cut: in the reversed network, source-side reach marks the
    # sink-minimal forward cut; a left copy is in that cover iff reachable
    # there, a right copy iff not
    cover_max = set()
    for u in range(g.n):
        left, right = 2 * u, 2 * u + 1
        if reach_rev[left]:
            cover_max.add(left)
        if not reach_rev[right]:
            cover_max.add(right)

    if cover_min == cover_max:
        # unique minimum cut, hence unique LP optimum; skip the probes
        levels = _levels_from_cover(g.n, cover_min)
    else:
        levels = _refine_levels(dc, value)

    if exact:
        return tuple(Fraction(l, 2) for l in levels)
    return tuple(l / 2.0 for l in levels)


def _value_close(dc: _DoubleCover, a, b) -> bool:
    if dc.exact:
        return a == b
    scale = max(1.0, abs(float(b)))
    return abs(float(a) - float(b)) <= 1e-9 * scale


def _refine_levels(dc: _DoubleCover, opt_value):
    """Greedy exact tie-break: first avoid level 1 per node in id order, then
    prefer level 0 over 1/2."""
    forced_in: set[int] = set()
    forced_out: set[int] = set()
    n = dc.n

    def still_optimal() -> bool:
        val, _r, _rr = dc.cut(forced_in, forced_out)
        return _value_close(dc, val, opt_value)

    # pass 1: minimize the set of 1-valued nodes greedily
    for u in range(n):
        left, right = 2 * u, 2 * u + 1
        forced_out.add(left)
        if still_optimal():
            continue
        forced_out.discard(left)
        forced_out.add(right)
        if still_optimal():
            continue
        forced_out.discard(right)
        forced_in.add(left)
        forced_in.add(right)

    # pass 2: prefer 0 to 1/2.  After pass 1 each node has exactly one copy
    # forced out (or both copies forced in, level 1, skipped here).
    for u in range(n):
        left, right = 2 * u, 2 * u + 1
        if left in forced_in and right in forced_in:
            continue
        free = right if left in forced_out else left
        forced_out.add(free)
        if still_optimal():
            continue
        forced_out.discard(free)
        # every optimal completion keeps the free copy in the cover
        forced_in.add(free)
        if not still_optimal():
            raise SizeLimitError("tie refinement lost optimality; this is a bug")

    levels = []
    for u in range(n):
        lv = 0
        if 2 * u in forced_in:
            lv += 1
        if 2 * u + 1 in forced_in:
            lv += 1
        levels.append(lv)
    return levels


def vc_lp_value(g: Graph, costs):
    x = vc_lp_solve(g, costs)
    exact_costs = _exact_costs(costs)
    if x and isinstance(x[0], Fraction) and exact_costs is not None:
        return sum((c * xv for c, xv in zip(exact_costs, x)), Fraction(0))
    return sum(float(c) * float(xv) for c, xv in zip(costs, x))


def vc_lp_restricted_value(g: Graph, costs, node: int, level):
    """LP optimum over solutions with x_node pinned to `level` in {0, 1/2, 1},
    counting only the other nodes' costs (node's own cost is ignored)."""
    exact_costs = _exact_costs(costs)
    exact = exact_costs is not None
    use = list(exact_costs) if exact else [float(c) for c in costs]
    use[node] = Fraction(0) if exact else 0.0
    dc = _DoubleCover(g, use, exact)
    left, right = 2 * node, 2 * node + 1
    lv = Fraction(level) if exact else float(level)
    if lv == 0:
        val, _r, _rr = dc.cut(forced_out=(left, right))
        return val
    if lv == 1:
        val, _r, _rr = dc.cut(forced_in=(left, right))
        return val
    a, _r, _rr = dc.cut(forced_in=(left,), forced_out=(right,))
    b, _r2, _rr2 = dc.cut(forced_in=(right,), forced_out=(left,))
    return a if a <= b else b


def vc_lp_via_simplex(g: Graph, costs):
    """The same LP through the simplex solver (independent route for tests)."""
    rows = []
    for u, v in g.edges:
        coeffs = [0] * g.n
        coeffs[u] = 1
        coeffs[v] = 1
        rows.append((tuple(coeffs), ">=", 1))
    for u in range(g.n):
        coeffs = [0] * g.n
        coeffs[u] = 1
        rows.append((tuple(coeffs), "<=", 1))
    lp = LinearProgram("min", tuple(costs), tuple(rows))
    return solve_lp(lp)


# ---------------------------------------------------------------------------
# facility location enumeration


def ufl_exact(inst: UFLInstance) -> tuple[frozenset[int], tuple[int, ...], float]:
    """Cheapest (open set, nearest assignment) by exhaustion; |F| <= 16."""
    nf = inst.n_facilities
    if nf > 16:
        raise SizeLimitError(f"exact facility location capped at 16 facilities, got {nf}")
    best_mask = -1
    best_cost = None
    best_sigma = None
    for mask in range(1, 1 << nf):
        open_cost = 0.0
        for f in range(nf):
            if mask >> f & 1:
                open_cost += inst.open_costs[f]
        sigma = []
        total = open_cost
        for j in range(inst.n_clients):
            bf = -1
            bc = None
            for f in range(nf):
                if mask >> f & 1:
                    c = inst.assign[f][j]
                    if bc is None or c < bc:
                        bc = c
                        bf = f
            sigma.append(bf)
            total += bc
        if best_cost is None or total < best_cost or (
            total == best_cost and _mask_lex_better(mask, best_mask)
        ):
            best_cost = total
            best_mask = mask
            best_sigma = tuple(sigma)
    open_set = frozenset(f for f in range(nf) if best_mask >> f & 1)
    return open_set, best_sigma, best_cost


def _mask_lex_better(a: int, b: int) -> bool:
    diff = a ^ b
    if diff == 0:
        return False
    low = diff & -diff
    return bool(a & low)
