"""Tests for the game-theoretic verification toolkit and its baselines."""

from __future__ import annotations

import random

import pytest

from covermech.errors import MonotonicityError
from covermech.instances import Graph, Ownership, VCInstance, random_vc_instance
from covermech.thresholds import (
    VCMechanismResult,
    run_threshold_mechanism,
    scaled_edge_family,
)
from covermech.verify import (
    MonotonicityWitness,
    WMONWitness,
    five_cycle_fixture,
    frugality_nu,
    frugality_ratio_estimate,
    lp_rounding_cover,
    monotonicity_probe,
    ordered_dual_ascent,
    path_fixture,
    payment_benchmark,
    simultaneous_dual_ascent,
    truthfulness_check,
    truthfulness_report,
    wmon_check,
    wmon_sides,
)
from covermech.thresholds import neighborhood_ratio

from util import cycle, random_graph, star, triangle, unit_single_owner


def edge_runner(inst):
    return run_threshold_mechanism(
        scaled_edge_family(inst.graph, (1.0,) * inst.graph.n), inst
    )


# ---------------------------------------------------------------------------
# fixtures pinning the non-truthful baselines


def test_five_cycle_fixture_selections_and_sides():
    g, inst_a, inst_b = five_cycle_fixture()
    sel_a = lp_rounding_cover(g, inst_a.effective_costs)
    sel_b = lp_rounding_cover(g, inst_b.effective_costs)
    assert sel_a == frozenset({0, 1, 2, 3, 4})
    assert sel_b == frozenset({1, 3, 4})
    own = inst_a.ownership.sets[0]
    sides = wmon_sides(
        own, inst_a.effective_costs, sel_a, inst_b.effective_costs, sel_b
    )
    assert sides == (1.25, 1.125)
    assert sides[0] > sides[1] + 1e-9  # weak monotonicity broken

    witness = WMONWitness(0, inst_a, inst_b, sel_a, sel_b, sides)
    assert witness.replay(lambda i: lp_rounding_cover(i.graph, i.effective_costs))
    assert "exceeds" in witness.describe()


def test_path_fixture_selections_and_sides():
    g, inst_a, inst_b, edge_order = path_fixture()
    sel_a, _y = ordered_dual_ascent(g, inst_a.effective_costs, edge_order)
    sel_b, _y2 = ordered_dual_ascent(g, inst_b.effective_costs, edge_order)
    assert sel_a == frozenset({0, 1, 3})
    assert sel_b == frozenset({0, 1, 2})
    own = inst_a.ownership.sets[0]
    sides = wmon_sides(
        own, inst_a.effective_costs, sel_a, inst_b.effective_costs, sel_b
    )
    assert sides == pytest.approx((0.5, 0.3), abs=1e-12)
    assert sides[0] > sides[1] + 1e-9


def test_simultaneous_ascent_small_cases():
    # Triangle at unit costs: all duals tighten together.
    tight, frozen = simultaneous_dual_ascent(triangle(), (1.0, 1.0, 1.0))
    assert tight == frozenset({0, 1, 2})
    assert all(v == pytest.approx(0.5) for v in frozen.values())
    # Single edge: the cheap endpoint goes tight first.
    g = Graph.from_edges(2, [(0, 1)])
    tight2, _f = simultaneous_dual_ascent(g, (1.0, 2.0))
    assert tight2 == frozenset({0})
    # Second profile of the four-node path pins the regression output.
    path = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    tight3, _f3 = simultaneous_dual_ascent(path, (0.5, 3.0, 4.6, 2.4))
    assert tight3 == frozenset({0, 2})


def test_simultaneous_ascent_output_is_a_cover():
    rng = random.Random(241)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 9), rng.uniform(0.2, 0.8))
        costs = tuple(rng.uniform(0.1, 3.0) for _ in range(g.n))
        tight, _f = simultaneous_dual_ascent(g, costs)
        assert g.is_vertex_cover(tight)


# ---------------------------------------------------------------------------
# weak-monotonicity search


def test_wmon_clean_on_threshold_mechanism():
    def sampler(rng):
        return random_vc_instance(rng.randint(4, 8), 0.4, 2, seed=rng.randrange(10**6))

    witnesses = wmon_check(edge_runner, sampler, probes=300, seed=1)
    assert witnesses == []


def test_wmon_finds_lp_rounding_violation():
    def alg(inst):
        return lp_rounding_cover(inst.graph, inst.effective_costs)

    _g, inst_a, _inst_b = five_cycle_fixture()
    witnesses = wmon_check(alg, inst_a, probes=4000, seed=5)
    assert witnesses
    assert all(w.replay(alg) for w in witnesses)


def test_wmon_finds_ordered_ascent_violation():
    g, inst_a, _b, edge_order = path_fixture()

    def alg(inst):
        return ordered_dual_ascent(inst.graph, inst.effective_costs, edge_order)[0]

    witnesses = wmon_check(alg, inst_a, probes=4000, seed=5)
    assert witnesses
    assert all(w.replay(alg) for w in witnesses)


def test_wmon_finds_simultaneous_ascent_violation():
    own = Ownership(sets=((0, 3), (1,), (2,)))
    path = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])

    def sampler(rng):
        return VCInstance(
            graph=path,
            ownership=own,
            costs=(
                (0.3 + 2.0 * rng.random(), 0.3 + 3.0 * rng.random()),
                (0.5 + 3.0 * rng.random(),),
                (0.5 + 5.0 * rng.random(),),
            ),
        )

    def alg(inst):
        return simultaneous_dual_ascent(inst.graph, inst.effective_costs)[0]

    witnesses = wmon_check(alg, sampler, probes=20000, seed=5)
    assert witnesses
    assert all(w.replay(alg) for w in witnesses)


def test_wmon_sides_signature():
    # Hand-checkable: agent owns node 0; allocation a selects it, b does not.
    sides = wmon_sides((0,), (2.0, 9.0), {0}, (1.0, 9.0), set())
    assert sides == (2.0, 1.0)


# ---------------------------------------------------------------------------
# truthfulness grids


def test_truthfulness_zero_gain_for_threshold_mechanism():
    rng = random.Random(251)
    for _ in range(5):
        inst = random_vc_instance(7, 0.4, 2, seed=rng.randrange(10**6))
        max_gain, violations = truthfulness_check(edge_runner, inst, grid_size=25)
        assert max_gain <= 0.0 + 1e-12
        assert violations == []


def first_price_runner(inst):
    """Pay-your-bid rule: selected nodes receive their reported cost."""
    from covermech.oracles import min_vertex_cover_exact

    costs = inst.effective_costs
    cover, _v = min_vertex_cover_exact(inst.graph, costs)
    payments = [0.0] * inst.n_agents
    owners = inst.ownership.owners
    for u in cover:
        if u in owners:
            payments[owners[u][0]] += costs[u]
    return VCMechanismResult(
        selected=cover,
        payments=tuple(payments),
        thresholds=costs,
        feasible=True,
    )


def test_truthfulness_catches_first_price_rule():
    g = Graph.from_edges(2, [(0, 1)])
    inst = unit_single_owner(g, costs=(1.0, 3.0))
    max_gain, violations = truthfulness_check(first_price_runner, inst)
    assert max_gain > 1e-9
    assert violations
    report_gain, report_viol = truthfulness_report(first_price_runner, inst)
    assert report_gain > 0.0 and report_viol


# ---------------------------------------------------------------------------
# monotonicity probe


def cost_floor_runner(inst):
    """Broken rule: buys every node reporting at least 1, so a raised cost
    can pull a node in."""
    costs = inst.effective_costs
    sel = frozenset(u for u in range(inst.graph.n) if costs[u] >= 1.0)
    return VCMechanismResult(
        selected=sel,
        payments=(0.0,) * inst.n_agents,
        thresholds=costs,
        feasible=inst.graph.is_vertex_cover(sel),
    )


def test_monotonicity_probe_finds_floor_rule_flip():
    g = Graph.from_edges(2, [(0, 1)])
    inst = unit_single_owner(g, costs=(0.5, 2.0))
    witnesses = monotonicity_probe(cost_floor_runner, inst, probes=200, seed=3)
    assert witnesses
    w = witnesses[0]
    assert isinstance(w, MonotonicityWitness)
    assert not w.selected_before and w.selected_after
    assert w.new_cost > w.old_cost
    assert "flipped" in w.describe()
    with pytest.raises(MonotonicityError):
        monotonicity_probe(cost_floor_runner, inst, probes=200, seed=3, raise_on_failure=True)


def test_monotonicity_probe_clean_on_threshold_mechanism():
    inst = random_vc_instance(8, 0.4, 2, seed=77)
    assert monotonicity_probe(edge_runner, inst, probes=300, seed=4) == []


# ---------------------------------------------------------------------------
# payment benchmark


def test_payment_benchmark_hand_values():
    assert frugality_nu(triangle(), (1.0, 1.0, 1.0)).nu == pytest.approx(2.0)
    assert frugality_nu(star(3), (1.0,) * 4).nu == pytest.approx(3.0)
    g = Graph.from_edges(2, [(0, 1)])
    rep = frugality_nu(g, (1.0, 2.0))
    assert rep.nu == pytest.approx(2.0)
    assert rep.cover == frozenset({0})
    assert payment_benchmark(g, (1.0, 2.0)) == pytest.approx(2.0)


def test_payment_benchmark_at_least_half_total_cost():
    rng = random.Random(257)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 8), rng.uniform(0.2, 0.8))
        if g.m == 0:
            continue
        costs = tuple(rng.uniform(0.1, 2.0) for _ in range(g.n))
        active = set(g.nodes_with_edges())
        total = sum(c for u, c in enumerate(costs) if u in active)
        assert frugality_nu(g, costs).nu >= total / 2.0 - 1e-9


def test_payment_benchmark_cover_independent():
    from itertools import combinations

    rng = random.Random(263)
    checked = 0
    while checked < 8:
        g = random_graph(rng, rng.randint(2, 6), rng.uniform(0.3, 0.9))
        if g.m == 0:
            continue
        costs = tuple(float(rng.randint(1, 3)) for _ in range(g.n))
        best = None
        optima = []
        for k in range(g.n + 1):
            for sub in combinations(range(g.n), k):
                s = frozenset(sub)
                if not g.is_vertex_cover(s):
                    continue
                c = sum(costs[u] for u in s)
                if best is None or c < best - 1e-12:
                    best = c
                    optima = [s]
                elif abs(c - best) <= 1e-12:
                    optima.append(s)
        if len(optima) < 2:
            continue
        checked += 1
        values = {round(frugality_nu(g, costs, cover=s).nu, 7) for s in optima}
        assert len(values) == 1


def test_payment_benchmark_ratio_fields():
    g = Graph.from_edges(2, [(0, 1)])
    rep = frugality_nu(g, (1.0, 2.0), total_payment=3.0)
    assert rep.ratio == pytest.approx(1.5)
    empty = frugality_nu(Graph.from_edges(2, []), (1.0, 1.0), total_payment=1.0)
    assert empty.nu == 0.0 and empty.ratio == float("inf")


def test_frugality_ratio_estimate_single_edge_is_one():
    g = Graph.from_edges(2, [(0, 1)])

    def run_payments(costs):
        inst = unit_single_owner(g, costs=tuple(costs))
        return sum(edge_runner(inst).payments)

    assert frugality_ratio_estimate(run_payments, g, trials=40, seed=2) == pytest.approx(1.0)


def test_total_payment_within_twice_beta_nu():
    rng = random.Random(269)
    for _ in range(25):
        g = random_graph(rng, rng.randint(2, 8), rng.uniform(0.3, 0.8))
        if g.m == 0:
            continue
        costs = tuple(rng.uniform(0.1, 2.0) for _ in range(g.n))
        inst = unit_single_owner(g, costs=costs)
        total = sum(edge_runner(inst).payments)
        beta = neighborhood_ratio(g, (1.0,) * g.n)
        nu = frugality_nu(g, costs).nu
        assert total <= 2.0 * beta * nu + 1e-7
