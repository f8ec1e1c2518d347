"""Threshold mechanisms for vertex cover.

A threshold family assigns every node a price cap that may not depend on any
cost coordinate of the node's owner: the mechanism selects the nodes whose
reported cost is at most their threshold (ties select) and pays each selected
node exactly its threshold.  That structure makes the mechanism truthful and
individually rational, so everything else here is about choosing thresholds
with good approximation and payment behavior.

Three kinds are distinguished by what a threshold may read:

* ``general``  - anything except the owner's own coordinates;
* ``neighbor`` - only costs of the node's graph neighbors;
* ``edge``     - per-edge caps, each a function of that one neighbor's cost,
  combined by maximum.

Reads are enforced at runtime through a masked cost view; a forbidden read
raises ThresholdContractError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _kernels
from .density import orient_minimizing_indegree
from .errors import (
    MechanismPreconditionError,
    ScalingProbeError,
    SizeLimitError,
    ThresholdContractError,
)
from .instances import Graph, VCInstance

__all__ = [
    "CostView",
    "ThresholdFamily",
    "VCMechanismResult",
    "scaled_edge_family",
    "scaled_neighbor_family",
    "independence_ratio",
    "independence_witness",
    "neighborhood_ratio",
    "perron_scaling",
    "worst_case_instance",
    "evaluate_thresholds",
    "run_threshold_mechanism",
    "run_with_shared_ownership",
    "edge_family_from_neighbor",
    "ax_mechanism",
    "bx_mechanism",
    "alpha_Gx",
    "beta_Gx",
    "perron_vector",
    "tightness_instance",
    "neighbor_to_edge_convert",
    "nondisjoint_wrap",
]

ALPHA_DEGREE_CAP = 24


class CostView:
    """Read access to effective node costs with a forbidden set and an
    optional whitelist; violating reads raise ThresholdContractError."""

    __slots__ = ("_costs", "_forbidden", "_allowed", "_node")

    def __init__(self, costs, forbidden, allowed, node):
        self._costs = costs
        self._forbidden = forbidden
        self._allowed = allowed
        self._node = node

    def __getitem__(self, v: int) -> float:
        if v in self._forbidden:
            raise ThresholdContractError(
                f"threshold of node {self._node} read forbidden cost of node {v}"
            )
        if self._allowed is not None and v not in self._allowed:
            raise ThresholdContractError(
                f"neighbor-kind threshold of node {self._node} read non-neighbor {v}"
            )
        return self._costs[v]


@dataclass(frozen=True)
class ThresholdFamily:
    """kind general/neighbor: node_fns[u] maps a CostView to the threshold.
    kind edge: edge_fns[(u, v)] maps neighbor v's cost to u's cap for that
    edge, and the node threshold is the max over incident edges."""

    kind: str
    graph: Graph
    node_fns: dict = field(default_factory=dict)
    edge_fns: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("general", "neighbor", "edge"):
            raise MechanismPreconditionError(f"unknown threshold kind {self.kind!r}")

    def threshold_at(self, u: int, costs, forbidden) -> float:
        """Threshold of u on the given effective costs under the mask."""
        if self.kind == "edge":
            best = 0.0
            for v in self.graph.adj[u]:
                fn = self.edge_fns.get((u, v))
                if fn is None:
                    continue
                if v in forbidden:
                    raise ThresholdContractError(
                        f"edge threshold ({u},{v}) reads forbidden cost of {v}"
                    )
                cand = fn(costs[v])
                if cand > best:
                    best = cand
            return best
        fn = self.node_fns.get(u)
        if fn is None:
            return 0.0
        allowed = set(self.graph.adj[u]) if self.kind == "neighbor" else None
        return fn(CostView(costs, forbidden, allowed, u))


def _owner_masks(inst: VCInstance) -> list[frozenset[int]]:
    """Forbidden read set per node: all nodes of every agent owning it, or
    just the node itself when public."""
    masks = []
    owners = inst.ownership.owners
    for u in range(inst.graph.n):
        if u in owners:
            forb = set()
            for i in owners[u]:
                forb.update(inst.ownership.sets[i])
            masks.append(frozenset(forb))
        else:
            masks.append(frozenset((u,)))
    return masks


def evaluate_thresholds(family: ThresholdFamily, inst: VCInstance) -> tuple[float, ...]:
    costs = inst.effective_costs
    masks = _owner_masks(inst)
    return tuple(
        family.threshold_at(u, costs, masks[u]) for u in range(inst.graph.n)
    )


@dataclass(frozen=True)
class VCMechanismResult:
    selected: frozenset[int]
    payments: tuple[float, ...]
    thresholds: tuple[float, ...]
    feasible: bool
    part_count: int = 1


def run_threshold_mechanism(family: ThresholdFamily, inst: VCInstance) -> VCMechanismResult:
    """Select nodes priced at or below their threshold and pay thresholds.

    Requires disjoint ownership; use run_with_shared_ownership otherwise.
    """
    if not inst.ownership.is_disjoint:
        raise MechanismPreconditionError(
            "ownership sets overlap; use run_with_shared_ownership"
        )
    if family.graph.edges != inst.graph.edges or family.graph.n != inst.graph.n:
        raise MechanismPreconditionError("family and instance graphs differ")
    costs = inst.effective_costs
    thr = evaluate_thresholds(family, inst)
    selected = frozenset(u for u in range(inst.graph.n) if costs[u] <= thr[u])
    payments = [0.0] * inst.n_agents
    owners = inst.ownership.owners
    for u in selected:
        if u in owners:
            payments[owners[u][0]] += thr[u]
    return VCMechanismResult(
        selected=selected,
        payments=tuple(payments),
        thresholds=thr,
        feasible=inst.graph.is_vertex_cover(selected),
    )


def run_with_shared_ownership(
    family: ThresholdFamily, inst: VCInstance, two_hop_certified: bool = False
) -> VCMechanismResult:
    """Overlapping-ownership wrapper for neighbor or edge kind families.

    Thresholds are computed at the pointwise-minimum costs; an owner's
    personal cap is the smaller of that threshold and every co-owner's
    report, and at equality the node is bought from the lowest-index owner.
    The selected set coincides with the family's output on the min-cost
    instance.

    General-kind families are rejected unless the caller certifies that no
    threshold reads a cost the owner of its node controls; the masked view
    still enforces that claim read by read.
    """
    if family.kind not in ("neighbor", "edge") and not two_hop_certified:
        raise MechanismPreconditionError(
            "shared-ownership wrapper needs a neighbor or edge kind family"
        )
    costs = inst.effective_costs  # pointwise minimum over owners
    masks = _owner_masks(inst)
    thr = tuple(family.threshold_at(u, costs, masks[u]) for u in range(inst.graph.n))
    owners = inst.ownership.owners
    selected = set()
    payments = [0.0] * inst.n_agents
    for u in range(inst.graph.n):
        if u not in owners:
            if costs[u] <= thr[u]:
                selected.add(u)
            continue
        winner = -1
        winner_cap = 0.0
        for i in owners[u]:
            others = [inst.cost(j, u) for j in owners[u] if j != i]
            cap = min([thr[u]] + others)
            if inst.cost(i, u) <= cap:
                winner = i
                winner_cap = cap
                break  # owners are scanned in ascending id order
        if winner >= 0:
            selected.add(u)
            payments[winner] += winner_cap
    return VCMechanismResult(
        selected=frozenset(selected),
        payments=tuple(payments),
        thresholds=thr,
        feasible=inst.graph.is_vertex_cover(selected),
    )


# ---------------------------------------------------------------------------
# scaled families and their parameters


def _check_scaling(g: Graph, x) -> tuple[float, ...]:
    xs = tuple(float(v) for v in x)
    if len(xs) != g.n:
        raise MechanismPreconditionError("scaling vector length must equal node count")
    if any(v <= 0 or not math.isfinite(v) for v in xs):
        raise MechanismPreconditionError("scaling vector must be strictly positive")
    return xs


def scaled_edge_family(g: Graph, x) -> ThresholdFamily:
    """Edge caps x_u * c_v / x_v: a node is paid up to its scaled share of
    the most expensive neighbor."""
    xs = _check_scaling(g, x)
    fns = {}
    for u, v in g.edges:
        fns[(u, v)] = _ratio_cap(xs[u] / xs[v])
        fns[(v, u)] = _ratio_cap(xs[v] / xs[u])
    return ThresholdFamily(kind="edge", graph=g, edge_fns=fns, name="scaled-edge")


def _ratio_cap(ratio: float):
    def fn(c: float) -> float:
        return ratio * c

    return fn


def scaled_neighbor_family(g: Graph, x) -> ThresholdFamily:
    """Neighbor-sum caps sum_v x_u * c_v / x_v over v in N(u)."""
    xs = _check_scaling(g, x)
    fns = {}
    for u in range(g.n):
        fns[u] = _neighbor_sum(g.adj[u], xs, u)
    return ThresholdFamily(kind="neighbor", graph=g, node_fns=fns, name="scaled-neighbor")


def _neighbor_sum(nbrs, xs, u):
    def fn(view: CostView) -> float:
        return sum(xs[u] * view[v] / xs[v] for v in nbrs)

    return fn


def independence_witness(g: Graph, x) -> tuple[float, int, tuple[int, ...]]:
    """(ratio, node, independent neighbor subset) achieving the maximum of
    x(S) / x_u over nodes u and independent S inside N(u).  Neighborhood
    subsets are enumerated, so the maximum degree is capped at 24."""
    xs = _check_scaling(g, x)
    if g.max_degree > ALPHA_DEGREE_CAP:
        raise SizeLimitError(
            f"independence ratio capped at degree {ALPHA_DEGREE_CAP}, got {g.max_degree}"
        )
    best_ratio = 0.0
    best_u = -1
    best_set: tuple[int, ...] = ()
    for u in range(g.n):
        nbrs = g.adj[u]
        if not nbrs:
            continue
        idx = {v: k for k, v in enumerate(nbrs)}
        local_adj = [0] * len(nbrs)
        for a in nbrs:
            for b in g.adj[a]:
                if b in idx and b != a:
                    local_adj[idx[a]] |= 1 << idx[b]
        mask, weight = _kernels.max_weight_independent_set(
            len(nbrs), local_adj, [xs[v] for v in nbrs]
        )
        ratio = weight / xs[u]
        if ratio > best_ratio:
            best_ratio = ratio
            best_u = u
            best_set = tuple(nbrs[k] for k in range(len(nbrs)) if mask >> k & 1)
    return best_ratio, best_u, best_set


def independence_ratio(g: Graph, x) -> float:
    """max over nodes u of the largest x-weight of an independent subset of
    N(u), divided by x_u.  Both scaled families approximate within this
    ratio plus one."""
    return independence_witness(g, x)[0]


def neighborhood_ratio(g: Graph, x) -> float:
    """max over nodes of x(N(u)) / x_u; bounds total payments by this factor
    times total cost."""
    xs = _check_scaling(g, x)
    best = 0.0
    for u in range(g.n):
        if g.adj[u]:
            best = max(best, sum(xs[v] for v in g.adj[u]) / xs[u])
    return best


def perron_scaling(g: Graph, tol: float = 1e-10, max_iters: int = 100000):
    """Positive principal eigenvector of the adjacency matrix, computed per
    connected component by power iteration on A + I (which cannot oscillate
    on bipartite components).  Normalized to maximum entry 1 per component;
    isolated nodes get 1.  Returns (x, eigenvalue_estimate)."""
    import numpy as np

    n = g.n
    x = [1.0] * n
    lam_max = 0.0
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        qi = 0
        while qi < len(comp):
            u = comp[qi]
            qi += 1
            for v in g.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
        if len(comp) == 1:
            continue
        idx = {u: k for k, u in enumerate(comp)}
        mat = np.zeros((len(comp), len(comp)))
        for u in comp:
            for v in g.adj[u]:
                mat[idx[u], idx[v]] = 1.0
        mat += np.eye(len(comp))
        vec = np.ones(len(comp))
        lam = 1.0
        for _ in range(max_iters):
            nxt = mat @ vec
            lam = float(np.max(nxt))
            nxt = nxt / lam
            if float(np.max(np.abs(nxt - vec))) <= tol:
                vec = nxt
                break
            vec = nxt
        vec = vec / float(np.max(vec))
        for u in comp:
            x[u] = float(vec[idx[u]])
        lam_max = max(lam_max, lam - 1.0)
    return tuple(x), lam_max


def worst_case_instance(g: Graph, x) -> tuple[VCInstance, float]:
    """Instance on which the edge-scaled mechanism pays out its full ratio:
    the witness node and its heaviest independent neighbor set carry their
    scaling values as costs, everything else is free, each node its own
    agent.  Returns the instance and the ratio 1 + independence ratio."""
    xs = _check_scaling(g, x)
    best_ratio, best_u, best_set = independence_witness(g, x)
    if best_u < 0:
        raise MechanismPreconditionError("graph has no edges; no worst case exists")
    costs = [0.0] * g.n
    costs[best_u] = xs[best_u]
    for v in best_set:
        costs[v] = xs[v]
    from .instances import Ownership

    ownership = Ownership(tuple((u,) for u in range(g.n)))
    inst = VCInstance(g, ownership, tuple((c,) for c in costs))
    return inst, 1.0 + best_ratio


# ---------------------------------------------------------------------------
# neighbor -> edge conversion


def _probe_threshold(family: ThresholdFamily, u: int, v: int, n: int):
    """t_u as a function of c_v with every other cost zero."""
    costs = [0.0] * n

    def f(beta: float) -> float:
        costs[v] = beta
        try:
            return family.threshold_at(u, costs, frozenset((u,)))
        finally:
            costs[v] = 0.0

    return f


def edge_family_from_neighbor(
    family: ThresholdFamily,
    probe_limit: float = 1e6,
    rel_tol: float = 1e-9,
) -> ThresholdFamily:
    """Convert a neighbor-kind family to an edge-kind one.

    For each edge, oriented by the minimum-maximum-indegree orientation, the
    head's cost is swept to find the smallest value sigma past which the
    tail's threshold stays at least 1 (bisection to relative tolerance, with
    geometric spot checks of the tail of the sweep).  The edge then carries
    the linear caps: tail pays up to head_cost / sigma, head up to
    sigma * tail_cost.  A threshold that never reaches 1 below the probe
    limit has no finite scaling; that raises ScalingProbeError.
    """
    if family.kind not in ("neighbor", "edge"):
        raise MechanismPreconditionError("conversion expects a neighbor-kind family")
    g = family.graph
    heads = orient_minimizing_indegree(g)
    edge_fns = {}
    for e in g.edges:
        head = heads[e]
        tail = e[0] if head == e[1] else e[1]
        f = _probe_threshold(family, tail, head, g.n)
        sigma = _smallest_sufficient_cost(f, probe_limit, rel_tol, tail, head)
        if sigma <= 0.0:
            edge_fns[(tail, head)] = _infinite_cap
            edge_fns[(head, tail)] = _ratio_cap(0.0)
        else:
            edge_fns[(tail, head)] = _ratio_cap(1.0 / sigma)
            edge_fns[(head, tail)] = _ratio_cap(sigma)
    return ThresholdFamily(kind="edge", graph=g, edge_fns=edge_fns, name="converted-edge")


def _infinite_cap(c: float) -> float:
    return math.inf


def _smallest_sufficient_cost(f, probe_limit, rel_tol, tail, head) -> float:
    if f(probe_limit) < 1.0:
        raise ScalingProbeError(
            f"threshold of node {tail} never reaches 1 for any cost of node "
            f"{head} up to {probe_limit}; no edge scaling exists"
        )
    if f(0.0) >= 1.0:
        return 0.0
    lo, hi = 0.0, probe_limit
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) >= 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rel_tol * max(hi, 1e-300):
            break
    sigma = hi
    # the infimum needs f >= 1 on the whole tail of the sweep, not just at
    # sigma; spot-check geometrically spaced points up to the probe limit
    if sigma > 0:
        for k in range(1, 9):
            beta = sigma * (probe_limit / sigma) ** (k / 8.0)
            if f(beta) < 1.0 - 1e-9:
                raise ScalingProbeError(
                    f"threshold of node {tail} drops below 1 again at cost "
                    f"{beta} of node {head}; not convertible"
                )
    return sigma


# ---------------------------------------------------------------------------
# interface aliases


def tightness_instance(g: Graph, x) -> VCInstance:
    """The worst-case instance alone, without its ratio."""
    return worst_case_instance(g, x)[0]


def neighbor_to_edge_convert(
    family: ThresholdFamily, g: Graph | None = None, probe_limit: float = 1e6
) -> ThresholdFamily:
    """Edge-kind conversion; `g`, when given, must match the family's graph."""
    if g is not None and (g.n != family.graph.n or g.edges != family.graph.edges):
        raise MechanismPreconditionError("conversion graph differs from the family's")
    return edge_family_from_neighbor(family, probe_limit=probe_limit)


ax_mechanism = scaled_edge_family
bx_mechanism = scaled_neighbor_family
alpha_Gx = independence_ratio
beta_Gx = neighborhood_ratio
perron_vector = perron_scaling
nondisjoint_wrap = run_with_shared_ownership
