"""Checks that turn the mechanism guarantees into runnable probes.

Three groups:

* behavioural probes for vertex-cover mechanisms: single-coordinate
  monotonicity with shrinking counterexample witnesses, weak-monotonicity
  search over random report pairs, and misreport grids that measure whether
  lying ever beats truth-telling;
* the payment benchmark: the largest total payment a cheapest cover could
  collect without being undercut by another cover, as an LP over minimal
  covers, plus a randomized estimate of a mechanism's overpayment factor
  against it;
* two classic non-truthful baselines (sequential and simultaneous primal-
  dual, and LP rounding) kept here because the regression fixtures pin
  down exactly how they break monotonicity.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import LPError, MonotonicityError
from .instances import Graph, Ownership, VCInstance
from .lp import LinearProgram, solve_lp
from .oracles import enumerate_minimal_vertex_covers, min_vertex_cover_exact, vc_lp_solve

__all__ = [
    "MonotonicityWitness",
    "monotonicity_probe",
    "WMONWitness",
    "wmon_sides",
    "wmon_check",
    "truthfulness_report",
    "truthfulness_check",
    "FrugalityReport",
    "frugality_nu",
    "payment_benchmark",
    "frugality_estimate",
    "frugality_ratio_estimate",
    "lp_rounding_algorithm",
    "lp_rounding_cover",
    "ordered_primal_dual",
    "ordered_dual_ascent",
    "simultaneous_primal_dual",
    "simultaneous_dual_ascent",
    "five_cycle_fixture",
    "path_fixture",
]


# ---------------------------------------------------------------------------
# monotonicity


@dataclass(frozen=True)
class MonotonicityWitness:
    """Replayable counterexample: node that flipped the wrong way when a
    single coordinate moved."""

    agent: int
    node: int
    old_cost: float
    new_cost: float
    selected_before: bool
    selected_after: bool

    def describe(self) -> str:
        direction = "decrease" if self.new_cost < self.old_cost else "increase"
        return (
            f"node {self.node} (agent {self.agent}) flipped "
            f"{self.selected_before}->{self.selected_after} on a cost "
            f"{direction} {self.old_cost} -> {self.new_cost}"
        )


def monotonicity_probe(
    run_fn, inst: VCInstance, probes: int, seed: int, raise_on_failure: bool = False
):
    """Random single-coordinate perturbations; selection must not drop a
    node whose cost fell, nor pick up a node whose cost rose.

    Counterexamples are shrunk by halving the perturbation toward the
    original cost before reporting.  Returns the witness list.
    """
    rng = random.Random(seed)
    base = run_fn(inst)
    witnesses: list[MonotonicityWitness] = []
    coords = [
        (i, k, node)
        for i, nodes in enumerate(inst.ownership.sets)
        for k, node in enumerate(nodes)
    ]
    if not coords:
        return witnesses
    for _p in range(probes):
        i, k, node = coords[rng.randrange(len(coords))]
        old = inst.costs[i][k]
        decrease = rng.random() < 0.5
        if decrease:
            new = old * rng.random()
        else:
            new = old + (old + 1.0) * rng.random()
        wit = _check_flip(run_fn, inst, base, i, k, node, old, new)
        if wit is not None:
            witnesses.append(_shrink(run_fn, inst, base, i, k, node, old, wit))
            if raise_on_failure:
                raise MonotonicityError(witnesses[-1].describe(), witnesses[-1])
    return witnesses


def _check_flip(run_fn, inst, base, agent, k, node, old, new):
    res = run_fn(inst.with_node_cost(agent, node, new))
    before = node in base.selected
    after = node in res.selected
    bad = (new < old and before and not after) or (new > old and not before and after)
    if not bad:
        return None
    return MonotonicityWitness(agent, node, old, new, before, after)


def _shrink(run_fn, inst, base, agent, k, node, old, witness, rounds: int = 20):
    """Halve the gap between the original and the violating cost while the
    violation persists, for a tighter witness."""
    best = witness
    lo, hi = old, witness.new_cost
    for _r in range(rounds):
        mid = (lo + hi) / 2.0
        wit = _check_flip(run_fn, inst, base, agent, k, node, old, mid)
        if wit is not None:
            best = wit
            hi = mid
        else:
            lo = mid
    return best


# ---------------------------------------------------------------------------
# weak monotonicity


def wmon_sides(own_nodes, costs_a, selected_a, costs_b, selected_b):
    """Both sides of the weak-monotonicity inequality for one agent.

    With allocations a and b produced at node-cost profiles costs_a and
    costs_b, returns (cost_a(a) - cost_a(b), cost_b(a) - cost_b(b)) summed
    over the agent's nodes.  Every monotone rule satisfies
    sides[0] <= sides[1]; a strictly larger left side certifies a
    violation.
    """
    side_a = sum(float(costs_a[u]) for u in own_nodes if u in selected_a) - sum(
        float(costs_a[u]) for u in own_nodes if u in selected_b
    )
    side_b = sum(float(costs_b[u]) for u in own_nodes if u in selected_a) - sum(
        float(costs_b[u]) for u in own_nodes if u in selected_b
    )
    return side_a, side_b


@dataclass(frozen=True)
class WMONWitness:
    """Replayable weak-monotonicity violation: one agent, two cost reports,
    and the two allocations whose restricted cost difference moves the
    wrong way."""

    agent: int
    instance_a: VCInstance
    instance_b: VCInstance
    selected_a: frozenset[int]
    selected_b: frozenset[int]
    sides: tuple[float, float]

    def describe(self) -> str:
        return (
            f"agent {self.agent}: cost_a(a) - cost_a(b) = {self.sides[0]} exceeds "
            f"cost_b(a) - cost_b(b) = {self.sides[1]}"
        )

    def replay(self, alg) -> bool:
        """Re-run the rule on both stored instances and confirm the same
        violation still holds."""
        sel_a = _selection_of(alg, self.instance_a)
        sel_b = _selection_of(alg, self.instance_b)
        own = self.instance_a.ownership.sets[self.agent]
        sides = wmon_sides(
            own,
            _node_costs(self.instance_a),
            sel_a,
            _node_costs(self.instance_b),
            sel_b,
        )
        return sides[0] > sides[1] + 1e-9


def _selection_of(alg, inst):
    out = alg(inst)
    if hasattr(out, "selected"):
        return frozenset(out.selected)
    return frozenset(out)


def _node_costs(inst: VCInstance):
    """Effective per-node costs seen by the rule (owner minimum)."""
    return inst.effective_costs


def wmon_check(alg, gen, probes: int = 1000, seed: int = 0):
    """Search for weak-monotonicity violations.

    `gen` is either a fixed instance or a sampler called with the RNG to
    draw a fresh context per probe.  Each probe picks an agent and either
    resamples its whole cost vector uniformly in [0, 2c] or decreases a
    single coordinate, then compares the two allocations through
    `wmon_sides`.  Violations are shrunk by halving the perturbed report
    toward the truthful one while the violation survives.  Returns the
    list of witnesses.
    """
    rng = random.Random(seed)
    fixed = gen if isinstance(gen, VCInstance) else None
    if fixed is not None:
        fixed_sel = _selection_of(alg, fixed)
        fixed_costs = _node_costs(fixed)
    witnesses: list[WMONWitness] = []
    for _p in range(probes):
        if fixed is not None:
            inst, sel_a, costs_a = fixed, fixed_sel, fixed_costs
        else:
            inst = gen(rng)
            sel_a = _selection_of(alg, inst)
            costs_a = _node_costs(inst)
        n_agents = inst.ownership.n_agents
        if n_agents == 0:
            continue
        i = rng.randrange(n_agents)
        truthful = list(inst.costs[i])
        if rng.random() < 0.5:
            reported = [2.0 * c * rng.random() for c in truthful]
        else:
            reported = list(truthful)
            k = rng.randrange(len(reported))
            reported[k] = truthful[k] * rng.random()
        wit = _wmon_probe(alg, inst, sel_a, costs_a, i, reported)
        if wit is not None:
            witnesses.append(_wmon_shrink(alg, inst, sel_a, costs_a, i, truthful, wit))
    return witnesses


def _wmon_probe(alg, inst, sel_a, costs_a, agent, reported):
    inst_b = inst.with_agent_costs(agent, reported)
    sel_b = _selection_of(alg, inst_b)
    own = inst.ownership.sets[agent]
    sides = wmon_sides(own, costs_a, sel_a, _node_costs(inst_b), sel_b)
    if sides[0] <= sides[1] + 1e-9:
        return None
    return WMONWitness(agent, inst, inst_b, sel_a, sel_b, sides)


def _wmon_shrink(alg, inst, sel_a, costs_a, agent, truthful, witness, rounds: int = 20):
    best = witness
    far = list(witness.instance_b.costs[agent])
    for _r in range(rounds):
        mid = [(t + f) / 2.0 for t, f in zip(truthful, far)]
        wit = _wmon_probe(alg, inst, sel_a, costs_a, agent, mid)
        if wit is not None:
            best = wit
            far = mid
        else:
            truthful = mid
    return best


# ---------------------------------------------------------------------------
# truthfulness grids

MISREPORT_FACTORS = (0.0, 0.25, 0.5, 0.8, 1.25, 2.0, 4.0)


def truthfulness_report(run_fn, inst: VCInstance, factors=MISREPORT_FACTORS):
    """Utility of every single-coordinate misreport versus truth-telling.

    Utility of agent i is its payment minus the true cost of its selected
    nodes.  Returns (max gain over all misreports, violation list); the max
    gain of a truthful mechanism is non-positive up to noise.
    """
    base = run_fn(inst)
    truthful_utils = _utilities(inst, base)
    max_gain = -math.inf
    violations = []
    for i, nodes in enumerate(inst.ownership.sets):
        for k, node in enumerate(nodes):
            for factor in factors:
                reported = inst.costs[i][k] * factor
                if reported == inst.costs[i][k] and factor != 1.0:
                    continue
                res = run_fn(inst.with_node_cost(i, node, reported))
                util = _utilities(inst, res)[i]
                gain = util - truthful_utils[i]
                max_gain = max(max_gain, gain)
                if gain > 1e-7 * max(1.0, abs(truthful_utils[i])):
                    violations.append((i, node, factor, gain))
    return max_gain, violations


def truthfulness_check(run_fn, inst: VCInstance, grid_size: int = 50):
    """Misreport grid spanning [0, 2t] per owned node, t its threshold.

    Coordinate-wise deviations are exhaustive for threshold rules because
    the utility separates across a single agent's nodes: the gain of any
    joint deviation is the sum of single-node gains.  Returns
    (max gain, violation list); a truthful rule yields exactly zero gain.
    """
    base = run_fn(inst)
    truthful_utils = _utilities(inst, base)
    max_gain = 0.0
    violations = []
    for i, nodes in enumerate(inst.ownership.sets):
        for k, node in enumerate(nodes):
            top = 2.0 * base.thresholds[node]
            if top <= 0.0:
                top = 2.0 * max(1.0, inst.costs[i][k])
            for step in range(grid_size):
                reported = top * step / (grid_size - 1)
                if reported == inst.costs[i][k]:
                    continue
                res = run_fn(inst.with_node_cost(i, node, reported))
                util = _utilities(inst, res)[i]
                gain = util - truthful_utils[i]
                max_gain = max(max_gain, gain)
                if gain > 1e-9:
                    violations.append((i, node, reported, gain))
    return max_gain, violations


def _utilities(inst: VCInstance, result):
    """True-cost utilities against a (possibly misreported) outcome."""
    utils = list(result.payments)
    for i, nodes in enumerate(inst.ownership.sets):
        for k, node in enumerate(nodes):
            if node in result.selected:
                utils[i] -= inst.costs[i][k]
    return utils


# ---------------------------------------------------------------------------
# payment benchmark


@dataclass(frozen=True)
class FrugalityReport:
    """Payment benchmark value, the cheapest cover it is anchored at, and
    optionally the overpayment ratio of an observed total payment."""

    nu: float
    cover: frozenset[int]
    total_payment: float | None = None
    ratio: float | None = None


def frugality_nu(g: Graph, costs, total_payment=None, cover=None) -> FrugalityReport:
    """Largest total payment a cheapest cover can collect when every node
    must get at least its cost and no competing minimal cover may undercut
    the total.  Always finite: dropping any single node still leaves a
    cover, so every node's payment is capped by some competing cover.
    """
    if cover is None:
        cover, _value = min_vertex_cover_exact(g, costs)
    cover = frozenset(cover)
    nodes = sorted(cover)
    index = {u: k for k, u in enumerate(nodes)}
    if not nodes:
        nu = 0.0
    else:
        rows = []
        for k, u in enumerate(nodes):
            coeffs = [0.0] * len(nodes)
            coeffs[k] = 1.0
            rows.append((coeffs, ">=", float(costs[u])))
        for other in enumerate_minimal_vertex_covers(g):
            left = [u for u in nodes if u not in other]
            if not left:
                continue
            coeffs = [0.0] * len(nodes)
            for u in left:
                coeffs[index[u]] = 1.0
            rhs = sum(float(costs[v]) for v in other if v not in cover)
            rows.append((coeffs, "<=", rhs))
        lp = LinearProgram(sense="max", objective=[1.0] * len(nodes), rows=rows)
        sol = solve_lp(lp)
        if sol.status != "optimal":
            raise LPError(f"payment benchmark LP ended {sol.status}")
        nu = float(sol.value)
    ratio = None
    if total_payment is not None:
        ratio = math.inf if nu <= 0.0 < total_payment else (
            total_payment / nu if nu > 0.0 else 0.0
        )
    return FrugalityReport(nu=nu, cover=cover, total_payment=total_payment, ratio=ratio)


def payment_benchmark(g: Graph, costs, cover=None) -> float:
    """Benchmark value only; see `frugality_nu` for the full report."""
    return frugality_nu(g, costs, cover=cover).nu


def frugality_estimate(
    g: Graph, run_payments, probes: int = 50, seed: int = 0, climb_rounds: int = 40
):
    """Estimated overpayment factor: max over probed cost vectors of total
    payment divided by the benchmark, improved by coordinate hill climbing.

    `run_payments(costs)` returns the mechanism's total payment for unit
    single-owner agents at those costs.  Returns (ratio, witness costs).
    """
    rng = random.Random(seed)

    def ratio(costs):
        nu = payment_benchmark(g, costs)
        if nu <= 0.0:
            return 0.0
        return run_payments(costs) / nu

    best_costs = [1.0] * g.n
    best = ratio(best_costs)
    for _p in range(probes):
        cand = [0.05 + rng.random() for _u in range(g.n)]
        r = ratio(cand)
        if r > best:
            best, best_costs = r, cand
    for _c in range(climb_rounds):
        u = rng.randrange(g.n)
        cand = list(best_costs)
        cand[u] = max(0.01, cand[u] * rng.choice((0.5, 0.8, 1.25, 2.0)))
        r = ratio(cand)
        if r > best:
            best, best_costs = r, cand
    return best, best_costs


def frugality_ratio_estimate(
    run_payments, g: Graph, sampler=None, trials: int = 50, seed: int = 0
) -> float:
    """Worst observed payment-to-benchmark ratio over sampled cost vectors.

    `sampler(rng)` draws a cost vector (uniform in (0.05, 1.05) per node by
    default); `run_payments(costs)` returns the mechanism's total payment.
    """
    rng = random.Random(seed)
    if sampler is None:
        sampler = lambda r: [0.05 + r.random() for _u in range(g.n)]
    best = 0.0
    for _t in range(trials):
        costs = sampler(rng)
        nu = payment_benchmark(g, costs)
        if nu <= 0.0:
            continue
        best = max(best, run_payments(costs) / nu)
    return best


# ---------------------------------------------------------------------------
# non-truthful baselines pinned by regression fixtures


def lp_rounding_cover(g: Graph, costs) -> frozenset[int]:
    """Nodes at least half-covered in the refined LP optimum."""
    x = vc_lp_solve(g, costs)
    return frozenset(u for u in range(g.n) if float(x[u]) >= 0.5)


def ordered_dual_ascent(g: Graph, costs, edge_order):
    """Raise each edge's dual once, in the given order, as far as both
    endpoints allow; nodes whose cost gets exhausted enter the cover."""
    slack = [float(c) for c in costs]
    cover = []
    y = {}
    for e in edge_order:
        u, v = min(e), max(e)
        amount = min(slack[u], slack[v])
        y[(u, v)] = amount
        for w in (u, v):
            slack[w] -= amount
            if slack[w] <= 1e-12 and w not in cover:
                cover.append(w)
    return frozenset(cover), y


def simultaneous_dual_ascent(g: Graph, costs):
    """All edge duals rise in lockstep; an edge freezes the moment either
    endpoint becomes tight.  Simultaneous tight nodes freeze together."""
    slack = [float(c) for c in costs]
    frozen = {}
    active = set(g.edges)
    tight: list[int] = []
    t = 0.0
    while active:
        best = math.inf
        for u in range(g.n):
            k = sum(1 for e in active if u in e)
            if k == 0 or u in tight:
                continue
            frozen_sum = sum(v for e, v in frozen.items() if u in e)
            # k active edges each sit at value t, so u goes tight where
            # frozen_sum + k * T = c_u
            cand = max(t, (float(costs[u]) - frozen_sum) / k)
            best = min(best, cand)
        if best == math.inf:
            break
        t = best
        newly = []
        for u in range(g.n):
            if u in tight:
                continue
            k = sum(1 for e in active if u in e)
            if k == 0:
                continue
            frozen_sum = sum(v for e, v in frozen.items() if u in e)
            if frozen_sum + k * t >= float(costs[u]) - 1e-12:
                newly.append(u)
        for u in newly:
            tight.append(u)
        for e in list(active):
            if e[0] in newly or e[1] in newly:
                frozen[e] = t
                active.discard(e)
    return frozenset(tight), frozen


lp_rounding_algorithm = lp_rounding_cover
ordered_primal_dual = ordered_dual_ascent
simultaneous_primal_dual = simultaneous_dual_ascent


# ---------------------------------------------------------------------------
# regression fixtures


def five_cycle_fixture():
    """Five-cycle with one agent owning two non-adjacent nodes; the LP
    rounding rule drops an owned node when the owner lowers the other
    node's cost, breaking weak monotonicity.

    At the first cost profile the LP sits at all halves and rounding picks
    every node; at the second the optimum turns integral and the selection
    shrinks to three nodes, two of them outside the agent.
    """
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    own = Ownership(sets=((0, 3), (1,), (2,), (4,)))
    eps = 1.0 / 32.0
    costs_a = ((1.25, 1.0), (1.0,), (1.0,), (1.0,))
    costs_b = ((1.125, eps), (1.0,), (1.0,), (1.0,))
    inst_a = VCInstance(graph=g, ownership=own, costs=costs_a)
    inst_b = VCInstance(graph=g, ownership=own, costs=costs_b)
    return g, inst_a, inst_b


def path_fixture():
    """Path on four nodes with the two endpoints owned by one agent; the
    sequential primal-dual baseline flips an endpoint on a cost decrease.

    Processing edges left to right, the first cost profile selects
    {0, 1, 3} and the second (cheaper for the agent) selects {0, 1, 2},
    moving the restricted cost difference the wrong way.
    """
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    own = Ownership(sets=((0, 3), (1,), (2,)))
    costs_a = ((1.0, 0.5), (1.5,), (1.05,))
    costs_b = ((0.5, 0.3), (1.5,), (1.05,))
    inst_a = VCInstance(graph=g, ownership=own, costs=costs_a)
    inst_b = VCInstance(graph=g, ownership=own, costs=costs_b)
    edge_order = ((0, 1), (1, 2), (2, 3))
    return g, inst_a, inst_b, edge_order
