"""Decompositions that reduce multi-node agents to single-node pieces.

An agent owning several nodes breaks the simple threshold recipe, because a
node's threshold may not read any coordinate of its owner.  The escape is to
cover the edge set with subgraphs in which every agent keeps at most one
relevant node, run a single-dimensional mechanism on each part, and give
every node the maximum of its per-part thresholds.  Selection is then the
union of the part selections, costs add up across parts, and the combined
mechanism stays truthful.

Three pipelines are provided:

* random one-node-per-agent parts with an LP-based part mechanism (works on
  any graph, part count grows with the log of the edge count);
* low-degree peeling for everywhere-sparse graphs: degree-bounded induced
  parts handled by the edge-scaled mechanism plus bipartite leftover parts
  handled by a star mechanism (part count logarithmic in n);
* the peeling pipeline with the bipartite step collapsed to a single part,
  valid when no agent owns two nodes with a common neighbor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .density import densest_subgraph
from .errors import (
    CovermechError,
    LoopGuardError,
    MechanismPreconditionError,
)
from .instances import Graph, Ownership, VCInstance
from .oracles import vc_lp_restricted_value, vc_lp_solve
from .thresholds import (
    ThresholdFamily,
    VCMechanismResult,
    independence_ratio,
    run_threshold_mechanism,
    run_with_shared_ownership,
    scaled_edge_family,
)

__all__ = [
    "Part",
    "ZSubgraph",
    "lp_selection",
    "lp_critical_value",
    "lp_threshold_family",
    "singledim_vc_mechanism",
    "random_single_owner_parts",
    "random_singledim_decomposition",
    "run_random_decomposition",
    "rdim_mechanism",
    "PeelingResult",
    "peel_low_degree",
    "sparse_peeling",
    "star_rounds",
    "zj_decomposition",
    "star_part",
    "star_mechanism",
    "star_literal_selection",
    "build_sparse_parts",
    "run_sparse_mechanism",
    "minor_closed_mechanism",
    "run_three_hop_mechanism",
    "threehop_mechanism",
    "is_three_hop_separated",
    "three_hop_violation",
    "combine_parts",
    "combine",
    "run_combined",
    "total_ratio_bound",
]


@dataclass(frozen=True)
class Part:
    """One piece of a decomposition: the original edges it covers, the
    threshold family handling them (defined on original node ids), and the
    certified approximation factor of its selection against the optimum."""

    graph: Graph
    family: ThresholdFamily
    ratio_bound: float
    label: str = ""
    aux: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------------
# single-dimensional LP mechanism


def lp_selection(g: Graph, costs) -> frozenset[int]:
    """Nodes at least half-covered in the optimal LP relaxation solution.
    Monotone in each coordinate and within twice the optimum."""
    x = vc_lp_solve(g, costs)
    return frozenset(u for u in range(g.n) if float(x[u]) >= 0.5)


def lp_critical_value(g: Graph, costs, node: int) -> float:
    """Largest cost at which `node` is still selected, other costs fixed.

    The LP value as a function of c_node is min(A, c/2 + B, c + C), where
    A, B, C are the restricted optima with x_node pinned to 0, 1/2, 1 and
    the node's own cost ignored; the selection flips where the 0-branch
    takes over, at max(2(A - B), A - C).
    """
    a = vc_lp_restricted_value(g, costs, node, 0)
    b = vc_lp_restricted_value(g, costs, node, Fraction(1, 2))
    c = vc_lp_restricted_value(g, costs, node, 1)
    val = max(2 * (a - b), a - c)
    out = float(val)
    return out if out > 0.0 else 0.0


def lp_threshold_family(part_graph: Graph) -> ThresholdFamily:
    """Critical values of the LP selection as a threshold family.

    Meaningful as a truthful mechanism only when each agent owns at most one
    node with edges in the part; the masked cost view enforces that at
    evaluation time.
    """
    active = part_graph.nodes_with_edges()
    fns = {}
    for u in active:
        fns[u] = _lp_critical_fn(part_graph, active, u)
    return ThresholdFamily(kind="general", graph=part_graph, node_fns=fns, name="lp-critical")


def _lp_critical_fn(part_graph: Graph, active, u):
    def fn(view) -> float:
        costs = [0.0] * part_graph.n
        for v in active:
            if v != u:
                costs[v] = view[v]
        return lp_critical_value(part_graph, costs, u)

    return fn


# ---------------------------------------------------------------------------
# combining parts


def combine_parts(g: Graph, parts: list[Part]) -> ThresholdFamily:
    """Max-of-parts thresholds; requires the parts to cover every edge."""
    covered = set()
    for part in parts:
        covered.update(part.graph.edges)
    if covered != set(g.edges):
        missing = sorted(set(g.edges) - covered)
        raise CovermechError(f"decomposition does not cover edges {missing[:5]}")
    fns = {u: _max_over_parts(u, parts) for u in range(g.n)}
    return ThresholdFamily(kind="general", graph=g, node_fns=fns, name="combined")


_EMPTY: frozenset[int] = frozenset()


def _max_over_parts(u: int, parts: list[Part]):
    def fn(view) -> float:
        best = 0.0
        for part in parts:
            t = part.family.threshold_at(u, view, _EMPTY)
            if t > best:
                best = t
        return best

    return fn


def run_combined(inst: VCInstance, parts: list[Part]) -> VCMechanismResult:
    """Run the combined mechanism; the result carries the part count.

    Shared ownership goes through the overlapping-owner wrapper.  That is
    sound here because every part threshold reads costs through the masked
    view, so a hidden dependence on a co-owner's report still fails hard.
    """
    family = combine_parts(inst.graph, parts)
    if inst.ownership.is_disjoint:
        res = run_threshold_mechanism(family, inst)
    else:
        res = run_with_shared_ownership(family, inst, two_hop_certified=True)
    return VCMechanismResult(
        selected=res.selected,
        payments=res.payments,
        thresholds=res.thresholds,
        feasible=res.feasible,
        part_count=len(parts),
    )


def total_ratio_bound(parts: list[Part]) -> float:
    return sum(p.ratio_bound for p in parts)


# ---------------------------------------------------------------------------
# random one-node-per-agent decomposition


def random_single_owner_parts(inst: VCInstance, seed: int, guard_factor: int = 64) -> list[Graph]:
    """Subgraphs induced by one uniform node per agent plus all public nodes,
    repeated until every edge is covered.  Each part leaves every agent with
    at most one node, so the LP mechanism applies per part."""
    if not inst.ownership.is_disjoint:
        raise MechanismPreconditionError("random decomposition needs disjoint ownership")
    g = inst.graph
    if g.m == 0:
        return []
    rng = random.Random(seed)
    r = inst.ownership.dimension
    owners = inst.ownership.owners
    public = [u for u in range(g.n) if u not in owners]
    guard = max(4, int(guard_factor * r * r * math.log(g.m + 1)))
    covered: set[tuple[int, int]] = set()
    parts: list[Graph] = []
    while covered != set(g.edges):
        if len(parts) >= guard:
            raise LoopGuardError(
                f"random decomposition exceeded {guard} rounds without covering"
            )
        chosen = list(public)
        for nodes in inst.ownership.sets:
            chosen.append(nodes[rng.randrange(len(nodes))])
        part = g.induced_subgraph(chosen)
        parts.append(part)
        covered.update(part.edges)
    return parts


def run_random_decomposition(inst: VCInstance, seed: int) -> VCMechanismResult:
    parts_graphs = random_single_owner_parts(inst, seed)
    parts = [
        Part(graph=pg, family=lp_threshold_family(pg), ratio_bound=2.0, label="lp")
        for pg in parts_graphs
    ]
    return run_combined(inst, parts)


# ---------------------------------------------------------------------------
# low-degree peeling


@dataclass(frozen=True)
class PeelingResult:
    """Rounds of low-degree peeling.

    Each round q records the peeled node set T_q (degree at most 4*gamma in
    the residual graph), the induced part H_q on T_q, the residual neighbors
    R_q, and the leftover bipartite edges F_q between T_q and R_q.  The
    merged bipartite graph lives on copy ids: node u's peeled copy is u, its
    residual copy is n + u; every leftover edge (u2, v1) maps back to the
    original edge it came from.
    """

    gamma: Fraction
    rounds: tuple  # (T_q frozenset, R_q frozenset, H_q Graph, F_q edge tuple)
    merged: Graph  # bipartite graph on 2n copy ids
    copy_edge_of: dict  # original edge -> copy edge in merged
    n: int

    @property
    def k(self) -> int:
        return len(self.rounds)


def peel_low_degree(g: Graph, gamma: Fraction | None = None) -> PeelingResult:
    if gamma is None:
        gamma, _w = densest_subgraph(g)
    limit = 4 * gamma
    remaining = set(range(g.n))
    present = set(g.edges)
    rounds = []
    copy_edge_of: dict[tuple[int, int], tuple[int, int]] = {}
    merged_edges = []
    while remaining:
        deg = {u: 0 for u in remaining}
        for u, v in present:
            deg[u] += 1
            deg[v] += 1
        T = frozenset(u for u in remaining if deg[u] <= limit)
        if not T:
            raise CovermechError("peeling stalled; sparsity bound violated")
        h_edges = []
        f_edges = []
        R = set()
        rest = []
        for u, v in present:
            tu, tv = u in T, v in T
            if tu and tv:
                h_edges.append((u, v))
            elif tu or tv:
                t_node, r_node = (u, v) if tu else (v, u)
                f_edges.append((r_node, t_node))
                R.add(r_node)
                copy = (g.n + r_node, t_node)  # (residual copy, peeled copy)
                orig = (u, v)
                copy_edge_of[orig] = copy
                merged_edges.append(copy)
            else:
                rest.append((u, v))
        rounds.append((T, frozenset(R), g.induced_subgraph(T), tuple(f_edges)))
        remaining -= T
        present = set(rest)
    merged = Graph.from_edges(2 * g.n, merged_edges)
    result = PeelingResult(
        gamma=gamma, rounds=tuple(rounds), merged=merged, copy_edge_of=copy_edge_of, n=g.n
    )
    if g.n > 0 and result.k > math.ceil(math.log2(g.n)) + 1:
        raise CovermechError(
            f"peeling took {result.k} rounds on {g.n} nodes; sparsity analysis violated"
        )
    for _T, _R, hq, _f in rounds:
        if hq.max_degree > limit:
            raise CovermechError("peeled part exceeds its degree bound")
    return result


# ---------------------------------------------------------------------------
# star mechanism on bipartite leftovers


@dataclass(frozen=True)
class ZSubgraph:
    """One bipartite round in copy-id space: edges between peeled copies
    (ids below n) and residual copies (ids n and up)."""

    edges: tuple[tuple[int, int], ...]
    n: int


def star_rounds(
    peel: PeelingResult, ownership: Ownership, seed: int, guard_factor: int = 64
) -> list[tuple[tuple[int, int], ...]]:
    """Cover the merged leftover edges with rounds picking one peeled copy
    per agent (plus all public peeled copies); each round keeps the edges
    incident to its picks.  Returns one copy-edge tuple per round."""
    f_edges = peel.merged.edges
    if not f_edges:
        return []
    rng = random.Random(seed)
    owners = ownership.owners
    r = ownership.dimension
    guard = max(4, int(guard_factor * r * math.log(len(f_edges) + 1)))
    # peeled-copy ids are < n; merged edges are sorted pairs, so recover the
    # peeled side explicitly
    t_side = set()
    for a, b in f_edges:
        t_node = a if a < peel.n else b
        t_side.add(t_node)
    public_t = {v for v in t_side if v not in owners}
    covered: set[tuple[int, int]] = set()
    out = []
    target = set(f_edges)
    while covered != target:
        if len(out) >= guard:
            raise LoopGuardError(f"star decomposition exceeded {guard} rounds")
        picks = set(public_t)
        for nodes in ownership.sets:
            picks.add(nodes[rng.randrange(len(nodes))])
        round_edges = []
        for a, b in f_edges:
            t_node = a if a < peel.n else b
            if t_node in picks:
                round_edges.append((a, b))
        out.append(tuple(round_edges))
        covered.update(round_edges)
    return out


def zj_decomposition(
    peel: PeelingResult, ownership: Ownership, r: int | None = None, seed: int = 0
) -> list[ZSubgraph]:
    """Bipartite rounds wrapped with their copy-space size.  `r` is
    informational (the ownership dimension is derived from `ownership`)."""
    del r
    return [ZSubgraph(edges=t, n=peel.n) for t in star_rounds(peel, ownership, seed)]


def _build_star_part(
    n: int, z_edges, ownership: Ownership | None, gamma_value: float
) -> Part:
    y_neighbors: dict[int, list[int]] = {}
    x_partners: dict[int, list[int]] = {}
    orig_edges = []
    for a, b in z_edges:
        t_copy = a if a < n else b
        r_copy = b if a < n else a
        t_orig = t_copy
        r_orig = r_copy - n
        y_neighbors.setdefault(r_orig, []).append(t_orig)
        x_partners.setdefault(t_orig, []).append(r_orig)
        orig_edges.append((min(t_orig, r_orig), max(t_orig, r_orig)))
    if ownership is not None:
        owners = ownership.owners
        for r_orig, nbrs in y_neighbors.items():
            seen_agents = set()
            for v in nbrs:
                for i in owners.get(v, ()):
                    if i in seen_agents:
                        raise CovermechError(
                            "bipartite round keeps two picked nodes of one agent "
                            f"adjacent to node {r_orig}"
                        )
                    seen_agents.add(i)
    fns = {}
    for w in set(y_neighbors) | set(x_partners):
        fns[w] = _star_fn(w, y_neighbors.get(w, ()), x_partners.get(w, ()), y_neighbors)
    part_graph = Graph.from_edges(n, orig_edges)
    return Part(
        graph=part_graph,
        family=ThresholdFamily(kind="general", graph=part_graph, node_fns=fns, name="star"),
        ratio_bound=8.0 * gamma_value,
        label="star",
        aux={"y_neighbors": y_neighbors, "x_partners": x_partners},
    )


def star_part(
    peel: PeelingResult, z_edges, ownership: Ownership | None, gamma_value: float
) -> Part:
    """Threshold family for one bipartite round, folded back to original ids.

    Residual-side node u: threshold is the total cost of its picked
    neighbors.  Picked node v: threshold is the best margin, over adjacent
    residual nodes u, of u's cost minus u's other picked neighbors' costs
    (clamped at zero).  Ties select; either side can cover an edge.
    """
    return _build_star_part(peel.n, z_edges, ownership, gamma_value)


def star_mechanism(
    z: ZSubgraph, ownership: Ownership | None = None, gamma: float = 1.0
) -> ThresholdFamily:
    """The star threshold family of one bipartite round, on original ids."""
    return _build_star_part(z.n, z.edges, ownership, gamma).family


def _star_fn(w: int, picked_neighbors, residual_partners, y_neighbors):
    def fn(view) -> float:
        best = 0.0
        if picked_neighbors:
            best = sum(view[v] for v in picked_neighbors)
        for u in residual_partners:
            margin = view[u]
            for v in y_neighbors[u]:
                if v != w:
                    margin -= view[v]
            if margin > best:
                best = margin
        return best

    return fn


def star_literal_selection(part: Part, costs) -> frozenset[int]:
    """The two-case star rule: buy the residual center when it is no pricier
    than its picked neighbors combined, otherwise buy those neighbors."""
    selected = set()
    for u, nbrs in part.aux["y_neighbors"].items():
        total = sum(costs[v] for v in nbrs)
        if costs[u] <= total:
            selected.add(u)
        if costs[u] >= total:
            selected.update(nbrs)
    return frozenset(selected)


# ---------------------------------------------------------------------------
# full sparse pipelines


def build_sparse_parts(
    inst: VCInstance,
    seed: int,
    single_round: bool = False,
    gamma: float | Fraction | None = None,
) -> tuple[list[Part], PeelingResult]:
    g = inst.graph
    peel = peel_low_degree(g, gamma)
    gamma_value = float(peel.gamma)
    parts: list[Part] = []
    for _T, _R, hq, _f in peel.rounds:
        if hq.m == 0:
            continue
        alpha = independence_ratio(hq, [1.0] * g.n)
        parts.append(
            Part(
                graph=hq,
                family=scaled_edge_family(hq, [1.0] * g.n),
                ratio_bound=alpha + 1.0,
                label="peeled",
            )
        )
    if peel.merged.m > 0:
        if single_round:
            rounds = [peel.merged.edges]
        else:
            rounds = star_rounds(peel, inst.ownership, seed)
        for z_edges in rounds:
            parts.append(star_part(peel, z_edges, inst.ownership, gamma_value))
    if not parts:
        parts.append(
            Part(
                graph=g.edge_subgraph([]),
                family=ThresholdFamily(kind="general", graph=g, name="empty"),
                ratio_bound=1.0,
                label="empty",
            )
        )
    return parts, peel


def run_sparse_mechanism(
    inst: VCInstance, seed: int, gamma: float | Fraction | None = None
) -> VCMechanismResult:
    """Peeling pipeline: degree-bounded parts under the edge-scaled
    mechanism, leftover bipartite edges under per-round star mechanisms."""
    _check_gamma(inst.graph, gamma)
    parts, _peel = build_sparse_parts(inst, seed, single_round=False, gamma=gamma)
    _validate_star_parts(inst, parts)
    return run_combined(inst, parts)


def _validate_star_parts(inst: VCInstance, parts: list[Part]) -> None:
    """Cross-check each star part's per-node thresholds against the literal
    two-case rule.  The threshold form may additionally pick nodes of zero
    cost (their clamped threshold is zero); those cost and pay nothing."""
    costs = inst.effective_costs
    for part in parts:
        if part.label != "star":
            continue
        literal = star_literal_selection(part, costs)
        fns = part.family.node_fns
        sel = frozenset(
            w for w in fns if costs[w] <= part.family.threshold_at(w, costs, _EMPTY)
        )
        extra = sel - literal
        if not literal <= sel or any(costs[w] != 0.0 for w in extra):
            raise CovermechError(
                "star thresholds disagree with the literal selection rule"
            )


def three_hop_violation(inst: VCInstance) -> tuple[int, int] | None:
    """(node, agent) such that the agent owns two neighbors of the node, or
    None when the instance keeps every agent's nodes three hops apart."""
    g = inst.graph
    for u in range(g.n):
        seen = set()
        for v in g.adj[u]:
            for i in inst.ownership.owners.get(v, ()):
                if i in seen:
                    return u, i
                seen.add(i)
    return None


def is_three_hop_separated(inst: VCInstance) -> bool:
    """No node has two neighbors owned by the same agent."""
    return three_hop_violation(inst) is None


def run_three_hop_mechanism(
    inst: VCInstance, gamma: float | Fraction | None = None
) -> VCMechanismResult:
    """Single-round variant of the sparse pipeline, valid when no two nodes
    of one agent share a neighbor (then all peeled copies can be picked at
    once).  Deterministic: no randomness is consumed."""
    bad = three_hop_violation(inst)
    if bad is not None:
        raise MechanismPreconditionError(
            f"agent {bad[1]} owns two neighbors of node {bad[0]}; "
            "use the general pipeline"
        )
    _check_gamma(inst.graph, gamma)
    parts, _peel = build_sparse_parts(inst, seed=0, single_round=True, gamma=gamma)
    _validate_star_parts(inst, parts)
    return run_combined(inst, parts)


def _check_gamma(g: Graph, gamma) -> None:
    """Reject sparsity parameters below the graph's true density."""
    if gamma is None:
        return
    true_gamma, _w = densest_subgraph(g)
    if float(gamma) < float(true_gamma) - 1e-9:
        raise MechanismPreconditionError(
            f"gamma={float(gamma)} is below the graph density {float(true_gamma)}"
        )


def sparse_peeling(g: Graph, gamma: float | Fraction | None = None) -> PeelingResult:
    """Low-degree peeling with an explicit density precondition check."""
    _check_gamma(g, gamma)
    return peel_low_degree(g, gamma)


def singledim_vc_mechanism(
    g: Graph, ownership: Ownership | None = None
) -> ThresholdFamily:
    """The LP critical-value family, checked against its single-node-per-agent
    precondition: no agent may own two nodes that carry edges of `g`."""
    if ownership is not None:
        active = set(g.nodes_with_edges())
        for i, nodes in enumerate(ownership.sets):
            inside = [u for u in nodes if u in active]
            if len(inside) > 1:
                raise MechanismPreconditionError(
                    f"agent {i} owns {len(inside)} active nodes; "
                    "single-dimensional mechanism needs at most one"
                )
    return lp_threshold_family(g)


def minor_closed_mechanism(
    inst: VCInstance, gamma: float | Fraction | None = None, seed: int = 0
) -> VCMechanismResult:
    """Sparse-peeling pipeline under its interface argument order."""
    return run_sparse_mechanism(inst, seed, gamma)


# Interface aliases.
combine = combine_parts
random_singledim_decomposition = random_single_owner_parts
rdim_mechanism = run_random_decomposition
threehop_mechanism = run_three_hop_mechanism
