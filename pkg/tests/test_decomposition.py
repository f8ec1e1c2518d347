"""Tests for part combination, peeling, star rounds, and the sparse pipelines."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from covermech.decomposition import (
    Part,
    ZSubgraph,
    build_sparse_parts,
    combine,
    combine_parts,
    lp_critical_value,
    lp_selection,
    lp_threshold_family,
    minor_closed_mechanism,
    peel_low_degree,
    random_single_owner_parts,
    rdim_mechanism,
    run_combined,
    run_random_decomposition,
    run_sparse_mechanism,
    run_three_hop_mechanism,
    singledim_vc_mechanism,
    sparse_peeling,
    star_literal_selection,
    star_mechanism,
    star_part,
    star_rounds,
    three_hop_violation,
    is_three_hop_separated,
    threehop_mechanism,
    total_ratio_bound,
    zj_decomposition,
)
from covermech.density import sparsity_gamma
from covermech.errors import CovermechError, MechanismPreconditionError
from covermech.instances import Graph, Ownership, VCInstance, random_vc_instance
from covermech.oracles import min_vertex_cover_exact, vc_lp_value
from covermech.thresholds import scaled_edge_family

from util import cycle, random_graph, star, triangle, unit_single_owner


def test_lp_selection_known_sets():
    assert lp_selection(triangle(), (1.0, 1.0, 1.0)) == frozenset({0, 1, 2})
    g = Graph.from_edges(2, [(0, 1)])
    assert lp_selection(g, (1.0, 5.0)) == frozenset({0})
    assert lp_selection(Graph.from_edges(3, []), (1.0, 1.0, 1.0)) == frozenset()


def bisect_critical(g, costs, node, hi=64.0):
    work = list(costs)

    def member(c):
        work[node] = c
        return node in lp_selection(g, tuple(work))

    if not member(0.0):
        return 0.0
    lo, up = 0.0, hi
    for _ in range(60):
        mid = 0.5 * (lo + up)
        if member(mid):
            lo = mid
        else:
            up = mid
    return up


def test_lp_critical_value_matches_selection_bisection():
    rng = random.Random(113)
    for _ in range(12):
        g = random_graph(rng, rng.randint(2, 7), rng.uniform(0.3, 0.8))
        if g.m == 0:
            continue
        costs = tuple(float(rng.randint(1, 6)) for _ in range(g.n))
        for node in rng.sample(range(g.n), min(2, g.n)):
            tau = lp_critical_value(g, costs, node)
            ref = bisect_critical(g, costs, node)
            assert abs(tau - ref) <= 1e-5 * max(1.0, ref)


def test_lp_critical_value_flip_behavior():
    rng = random.Random(127)
    for _ in range(15):
        g = random_graph(rng, rng.randint(2, 7), rng.uniform(0.3, 0.8))
        if g.m == 0:
            continue
        costs = [float(rng.randint(1, 5)) for _ in range(g.n)]
        node = rng.randrange(g.n)
        tau = lp_critical_value(g, tuple(costs), node)
        eps = 1e-6 * max(1.0, tau)
        if tau - eps > 0.0:
            costs[node] = tau - eps
            assert node in lp_selection(g, tuple(costs))
        costs[node] = tau + eps
        assert node not in lp_selection(g, tuple(costs))


def test_lp_critical_value_ignores_own_cost_and_isolated_nodes():
    g = Graph.from_edges(3, [(0, 1)])
    a = lp_critical_value(g, (1.0, 2.0, 9.0), 0)
    b = lp_critical_value(g, (77.0, 2.0, 9.0), 0)
    assert a == b == 2.0
    assert lp_critical_value(g, (1.0, 2.0, 9.0), 2) == 0.0


def test_combine_parts_takes_max_and_requires_cover():
    g = triangle()
    p01 = g.edge_subgraph([(0, 1)])
    p12 = g.edge_subgraph([(1, 2)])
    p02 = g.edge_subgraph([(0, 2)])
    parts = [
        Part(graph=p01, family=scaled_edge_family(p01, (1.0, 1.0, 1.0)), ratio_bound=2.0),
        Part(graph=p12, family=scaled_edge_family(p12, (1.0, 1.0, 1.0)), ratio_bound=2.0),
        Part(graph=p02, family=scaled_edge_family(p02, (1.0, 1.0, 1.0)), ratio_bound=2.0),
    ]
    fam = combine_parts(g, parts)
    inst = unit_single_owner(g, costs=(1.0, 2.0, 4.0))
    from covermech.thresholds import evaluate_thresholds

    thr = evaluate_thresholds(fam, inst)
    # Per-node max over its two incident single-edge parts.
    assert thr == (4.0, 4.0, 2.0)
    assert total_ratio_bound(parts) == 6.0
    with pytest.raises(CovermechError):
        combine_parts(g, parts[:2])
    assert combine is combine_parts


def test_run_combined_reports_part_count():
    g = triangle()
    p1 = g.edge_subgraph([(0, 1), (0, 2)])
    p2 = g.edge_subgraph([(1, 2)])
    parts = [
        Part(graph=p1, family=scaled_edge_family(p1, (1.0,) * 3), ratio_bound=2.0),
        Part(graph=p2, family=scaled_edge_family(p2, (1.0,) * 3), ratio_bound=2.0),
    ]
    res = run_combined(unit_single_owner(g), parts)
    assert res.part_count == 2
    assert res.feasible


def test_random_single_owner_parts_invariants():
    rng = random.Random(131)
    for _ in range(15):
        inst = random_vc_instance(10, 0.35, rng.randint(1, 3), seed=rng.randrange(10**6))
        parts = random_single_owner_parts(inst, seed=rng.randrange(10**6))
        covered = set()
        for pg in parts:
            covered.update(pg.edges)
            # at most one owned node per agent carries edges in the part
            active = set(pg.nodes_with_edges())
            for nodes in inst.ownership.sets:
                assert len([u for u in nodes if u in active]) <= 1
        assert covered == set(inst.graph.edges)


def test_random_single_owner_parts_edgeless_and_seeded():
    g = Graph.from_edges(4, [])
    inst = VCInstance(
        graph=g,
        ownership=Ownership(sets=((0,), (1,))),
        costs=((1.0,), (1.0,)),
    )
    assert random_single_owner_parts(inst, seed=0) == []
    inst2 = random_vc_instance(12, 0.3, 2, seed=9)
    a = random_single_owner_parts(inst2, seed=5)
    b = random_single_owner_parts(inst2, seed=5)
    assert [p.edges for p in a] == [p.edges for p in b]


def test_run_random_decomposition_feasible_within_bound():
    rng = random.Random(137)
    for _ in range(10):
        inst = random_vc_instance(9, 0.4, 2, seed=rng.randrange(10**6))
        res = run_random_decomposition(inst, seed=rng.randrange(10**6))
        assert res.feasible
        cost = sum(inst.effective_costs[u] for u in res.selected)
        _c, opt = min_vertex_cover_exact(inst.graph, inst.effective_costs)
        assert cost <= 2.0 * res.part_count * opt + 1e-9
    assert rdim_mechanism is run_random_decomposition


def test_peeling_invariants():
    rng = random.Random(139)
    graphs = [triangle(), cycle(5), star(6)]
    graphs += [random_graph(rng, rng.randint(2, 14), rng.uniform(0.1, 0.6)) for _ in range(15)]
    for g in graphs:
        peel = peel_low_degree(g)
        limit = 4 * peel.gamma
        seen = set()
        for T, R, hq, f_edges in peel.rounds:
            assert not (T & seen)
            seen |= T
            assert hq.max_degree <= limit
            for r_node, t_node in f_edges:
                assert t_node in T and r_node not in seen
        assert seen == set(range(g.n))
        assert peel.k <= math.ceil(math.log2(g.n)) + 1 if g.n > 1 else peel.k == 1
        # merged graph is bipartite between peeled copies (< n) and residual
        # copies (>= n), and maps back onto the uncovered original edges
        for a, b in peel.merged.edges:
            assert (a < peel.n) != (b < peel.n)
        h_edges = set()
        for _T, _R, hq, _f in peel.rounds:
            h_edges.update(hq.edges)
        mapped = set()
        for orig, copy in peel.copy_edge_of.items():
            assert orig in set(g.edges)
            assert copy in set(peel.merged.edges) or (copy[1], copy[0]) in set(
                peel.merged.edges
            )
            mapped.add(orig)
        assert mapped | h_edges == set(g.edges)


def test_star_rounds_pick_one_node_per_agent_and_cover():
    rng = random.Random(149)
    for _ in range(10):
        inst = random_vc_instance(12, 0.35, 2, seed=rng.randrange(10**6))
        peel = peel_low_degree(inst.graph)
        if peel.merged.m == 0:
            continue
        rounds = star_rounds(peel, inst.ownership, seed=3)
        covered = set()
        for round_edges in rounds:
            covered.update(round_edges)
            t_nodes = {a if a < peel.n else b for a, b in round_edges}
            for nodes in inst.ownership.sets:
                assert len([u for u in nodes if u in t_nodes]) <= 1
        assert covered == set(peel.merged.edges)
        assert star_rounds(peel, inst.ownership, seed=3) == rounds
        zs = zj_decomposition(peel, inst.ownership, seed=3)
        assert [z.edges for z in zs] == rounds


def test_star_mechanism_hand_thresholds():
    # One residual center (original node 0) with picked neighbors 1 and 2.
    z = ZSubgraph(edges=((1, 3), (2, 3)), n=3)
    fam = star_mechanism(z)
    nothing = frozenset()

    def thr(costs):
        return tuple(fam.threshold_at(u, costs, nothing) for u in range(3))

    assert thr((2.0, 1.0, 1.0)) == (2.0, 1.0, 1.0)  # tie selects all
    assert thr((5.0, 1.0, 1.0)) == (2.0, 4.0, 4.0)  # only the leaves
    assert thr((1.0, 3.0, 4.0)) == (7.0, 0.0, 0.0)  # only the center


def test_star_part_matches_literal_rule():
    rng = random.Random(151)
    done = 0
    while done < 8:
        inst = random_vc_instance(12, 0.4, 2, seed=rng.randrange(10**6))
        peel = peel_low_degree(inst.graph)
        if peel.merged.m == 0:
            continue
        rounds = star_rounds(peel, inst.ownership, seed=1)
        part = star_part(peel, rounds[0], inst.ownership, float(peel.gamma))
        assert part.ratio_bound == pytest.approx(8.0 * float(peel.gamma))
        done += 1
        for _ in range(20):
            costs = tuple(rng.uniform(0.1, 4.0) for _ in range(inst.graph.n))
            literal = star_literal_selection(part, costs)
            fns = part.family.node_fns
            sel = frozenset(
                w
                for w in fns
                if costs[w] <= part.family.threshold_at(w, costs, frozenset())
            )
            assert sel == literal


def test_star_round_validity_rejects_sibling_picks():
    # Two nodes of one agent adjacent to the same residual node cannot be in
    # one round.
    g = Graph.from_edges(3, [(0, 2), (1, 2)])
    own = Ownership(sets=((0, 1), (2,)))
    peel = peel_low_degree(g)
    z_all = peel.merged.edges
    if z_all:
        with pytest.raises(CovermechError):
            star_part(peel, z_all, own, 1.0)


def test_three_hop_violation_names_node_and_agent():
    g = Graph.from_edges(3, [(0, 1), (0, 2)])
    own = Ownership(sets=((1, 2), (0,)))
    inst = VCInstance(graph=g, ownership=own, costs=((1.0, 1.0), (1.0,)))
    assert three_hop_violation(inst) == (0, 0)
    assert not is_three_hop_separated(inst)
    with pytest.raises(MechanismPreconditionError) as err:
        run_three_hop_mechanism(inst)
    assert "agent 0" in str(err.value) and "node 0" in str(err.value)


def test_three_hop_mechanism_is_deterministic_and_feasible():
    g = star(9)
    own = Ownership(sets=tuple((u,) for u in range(1, 10)))
    costs = tuple((0.5 + 0.1 * i,) for i in range(9))
    inst = VCInstance(graph=g, ownership=own, costs=costs)
    assert is_three_hop_separated(inst)
    a = run_three_hop_mechanism(inst)
    b = threehop_mechanism(inst)
    assert a.selected == b.selected and a.payments == b.payments
    assert a.feasible


def test_gamma_precondition():
    g = star(9)
    sparse_peeling(g, Fraction(9, 10))
    sparse_peeling(g, 0.9)
    with pytest.raises(MechanismPreconditionError):
        sparse_peeling(g, 0.5)
    inst = unit_single_owner(g)
    with pytest.raises(MechanismPreconditionError):
        run_sparse_mechanism(inst, seed=0, gamma=0.5)
    res = run_sparse_mechanism(inst, seed=0, gamma=Fraction(9, 10))
    assert res.feasible


def test_singledim_precondition():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    bad = Ownership(sets=((0, 2), (1,), (3,)))
    with pytest.raises(MechanismPreconditionError):
        singledim_vc_mechanism(g, bad)
    sub = g.edge_subgraph([(0, 1)])
    fam = singledim_vc_mechanism(sub, bad)  # node 2 is inactive in this part
    assert fam.kind == "general"


def test_minor_closed_mechanism_argument_order():
    inst = random_vc_instance(10, 0.35, 2, seed=21)
    a = minor_closed_mechanism(inst, gamma=None, seed=4)
    b = run_sparse_mechanism(inst, 4, None)
    assert a.selected == b.selected
    assert a.payments == b.payments
    assert a.part_count == b.part_count


def test_sparse_pipeline_bound_and_ir():
    rng = random.Random(157)
    for _ in range(10):
        inst = random_vc_instance(rng.randint(4, 12), 0.35, 2, seed=rng.randrange(10**6))
        seed = rng.randrange(10**6)
        parts, _peel = build_sparse_parts(inst, seed)
        res = run_sparse_mechanism(inst, seed)
        assert res.feasible
        assert res.part_count == len(parts)
        cost = sum(inst.effective_costs[u] for u in res.selected)
        _c, opt = min_vertex_cover_exact(inst.graph, inst.effective_costs)
        assert cost <= total_ratio_bound(parts) * opt + 1e-9
        for u in res.selected:
            assert res.thresholds[u] >= inst.effective_costs[u] - 1e-12


def test_lp_part_cost_within_twice_lp():
    rng = random.Random(163)
    for _ in range(10):
        g = random_graph(rng, rng.randint(2, 9), rng.uniform(0.3, 0.8))
        costs = tuple(rng.uniform(0.1, 3.0) for _ in range(g.n))
        sel = lp_selection(g, costs)
        assert g.is_vertex_cover(sel)
        assert sum(costs[u] for u in sel) <= 2.0 * float(vc_lp_value(g, costs)) + 1e-9


def test_lp_threshold_family_prices_selection():
    g = triangle()
    fam = lp_threshold_family(g)
    inst = unit_single_owner(g, costs=(1.0, 1.0, 1.0))
    from covermech.thresholds import run_threshold_mechanism

    res = run_threshold_mechanism(fam, inst)
    assert res.selected == frozenset({0, 1, 2})
    assert res.feasible
    for u in res.selected:
        assert res.thresholds[u] >= 1.0 - 1e-12
