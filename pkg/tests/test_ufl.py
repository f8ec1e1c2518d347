"""Tests for facility location: relaxation, dual ascent, decomposition, and
the sampled truthful mechanism."""

from __future__ import annotations

import random

import pytest

from covermech.errors import LMPCertificateError, SizeLimitError
from covermech.instances import UFLInstance, random_ufl_instance
from covermech.oracles import ufl_exact
from covermech.ufl import (
    RHO,
    FractionalSolution,
    convex_decompose,
    enumerate_decompose,
    fractional_connect_cost,
    fractional_vcg_payments,
    jms_dual_ascent,
    jms_lmp,
    lmp_certificate,
    master_value,
    nearest_assignment,
    run_ufl_mechanism,
    solution_cost,
    solve_flp,
    solve_fractional,
)


def two_client_fixture():
    # Facility 0 costs 3 with both clients at distance 1; facility 1 exists
    # only to satisfy the two-agent requirement and is never worth opening.
    return UFLInstance(
        facility_agent=(0, 1),
        open_costs=(3.0, 50.0),
        n_clients=2,
        assign=((1.0, 1.0), (60.0, 60.0)),
    )


def fractional_triangle(seed=None):
    """Cyclic close/far metric whose optimal relaxation opens all three
    facilities at one half."""
    rng = random.Random(seed)
    jit = (lambda: 0.0) if seed is None else (lambda: 0.02 * rng.random())
    close = [[1.0 + jit() for _ in range(3)] for _ in range(3)]
    assign = []
    for l in range(3):
        row = []
        for j in range(3):
            row.append(3.0 if j == (l + 2) % 3 else close[l][j])
        assign.append(tuple(row))
    opens = tuple(1.0 + (0.0 if seed is None else 0.05 * rng.random()) for _ in range(3))
    return UFLInstance(
        facility_agent=(0, 1, 2), open_costs=opens, n_clients=3, assign=tuple(assign)
    )


def test_solve_flp_shape_and_feasibility():
    rng = random.Random(211)
    for _ in range(15):
        inst = random_ufl_instance(rng.randint(2, 5), rng.randint(1, 5), seed=rng.randrange(10**6))
        frac = solve_flp(inst)
        assert isinstance(frac, FractionalSolution)
        assert len(frac.y) == inst.n_facilities
        assert len(frac.x) == inst.n_facilities
        for j in range(inst.n_clients):
            assert sum(frac.x[l][j] for l in range(inst.n_facilities)) >= 1.0 - 1e-7
        for l in range(inst.n_facilities):
            for j in range(inst.n_clients):
                assert frac.x[l][j] <= frac.y[l] + 1e-7
        open_part = sum(inst.open_costs[l] * frac.y[l] for l in range(inst.n_facilities))
        assert frac.value == pytest.approx(open_part + fractional_connect_cost(inst, frac), abs=1e-6)
        _o, _s, opt = ufl_exact(inst)
        assert frac.value <= opt + 1e-7 * max(1.0, opt)


def test_fractional_triangle_lp_beats_integral():
    inst = fractional_triangle()
    inst.validate_metric()
    frac = solve_flp(inst)
    assert frac.y == pytest.approx((0.5, 0.5, 0.5), abs=1e-7)
    assert frac.value == pytest.approx(4.5, abs=1e-7)
    _o, _s, opt = ufl_exact(inst)
    assert opt == pytest.approx(5.0, abs=1e-9)


def test_dual_ascent_hand_fixture():
    inst = two_client_fixture()
    opened, sigma, alpha = jms_dual_ascent(inst)
    assert opened == [0]
    assert sigma == (0, 0)
    # Both clients push their offers to 2.5, splitting the opening cost of 3
    # on top of the two unit connections.
    assert alpha[0] == pytest.approx(2.5, abs=1e-9)
    assert alpha[1] == pytest.approx(2.5, abs=1e-9)
    f, c = solution_cost(inst, opened, sigma)
    assert f + c == pytest.approx(5.0, abs=1e-9)


def test_jms_lmp_shape_and_certificate():
    rng = random.Random(223)
    for _ in range(30):
        inst = random_ufl_instance(rng.randint(2, 6), rng.randint(1, 6), seed=rng.randrange(10**6))
        opened, sigma = jms_lmp(inst)
        assert opened
        assert all(sigma[j] in set(opened) for j in range(inst.n_clients))
        assert sigma == nearest_assignment(inst, opened)
        assert lmp_certificate(inst, opened, sigma)


def test_lmp_certificate_rejects_wasteful_solutions():
    inst = two_client_fixture()
    # Opening the 50-cost facility blows the budget rho * OPT_LP.
    sigma = nearest_assignment(inst, [1])
    assert not lmp_certificate(inst, [1], sigma)
    # The good solution passes with an explicit LP value too.
    value, _y, _x = solve_fractional(inst)
    assert lmp_certificate(inst, [0], (0, 0), lp_value=value)


def test_vcg_payments_cover_fractional_opening_cost():
    rng = random.Random(227)
    for _ in range(15):
        inst = random_ufl_instance(rng.randint(2, 5), rng.randint(1, 4), seed=rng.randrange(10**6))
        value, y, _x = solve_fractional(inst)
        vcg = fractional_vcg_payments(inst, value, y)
        assert len(vcg) == inst.n_agents
        for i in range(inst.n_agents):
            own = sum(inst.open_costs[l] * y[l] for l in inst.agent_facilities[i])
            assert vcg[i] >= own - 1e-9


def test_convex_decompose_identities_both_routes():
    rng = random.Random(229)
    for _ in range(20):
        inst = random_ufl_instance(rng.randint(2, 5), rng.randint(1, 5), seed=rng.randrange(10**6))
        frac = solve_flp(inst)
        for weights, cols in (convex_decompose(inst, frac), enumerate_decompose(inst, frac)):
            assert sum(weights) == pytest.approx(1.0, abs=1e-8)
            for l in range(inst.n_facilities):
                mixed = sum(w for w, col in zip(weights, cols) if l in col.open_facilities)
                assert mixed == pytest.approx(frac.y[l], abs=1e-6)
            conn = sum(
                w * sum(inst.assign[col.sigma[j]][j] for j in range(inst.n_clients))
                for w, col in zip(weights, cols)
            )
            assert conn <= RHO * fractional_connect_cost(inst, frac) + 1e-6
            assert master_value(inst, cols, frac) == pytest.approx(1.0, abs=1e-7)


def test_fractional_fixture_needs_multiple_columns():
    inst = fractional_triangle()
    frac = solve_flp(inst)
    weights, cols = convex_decompose(inst, frac)
    assert len(cols) >= 2
    assert master_value(inst, cols, frac) == pytest.approx(1.0, abs=1e-7)
    # A single integral column cannot mix to the all-half opening vector.
    assert master_value(inst, cols[:1], frac) < 1.0 - 1e-7


def test_convex_decompose_accepts_custom_algorithm():
    inst = fractional_triangle()
    frac = solve_flp(inst)
    calls = []

    def counting_alg(sub):
        calls.append(sub)
        return jms_lmp(sub)

    weights, cols = convex_decompose(inst, frac, alg=counting_alg)
    assert calls  # the pricing oracle actually ran
    assert sum(weights) == pytest.approx(1.0, abs=1e-8)


def test_convex_decompose_flags_stuck_pricing():
    inst = fractional_triangle()
    frac = solve_flp(inst)

    def stuck_alg(sub):
        opened = [0]
        return opened, nearest_assignment(inst, opened)

    with pytest.raises(LMPCertificateError):
        convex_decompose(inst, frac, alg=stuck_alg)


def test_enumerate_decompose_size_cap():
    inst = random_ufl_instance(9, 2, seed=5)
    with pytest.raises(SizeLimitError):
        enumerate_decompose(inst)


def test_sampled_mechanism_expectation_and_ir():
    rng = random.Random(233)
    for trial in range(12):
        inst = random_ufl_instance(rng.randint(2, 5), rng.randint(1, 4), seed=rng.randrange(10**6))
        res = run_ufl_mechanism(inst, seed=trial)
        exp = res.expected_payments()
        for i in range(inst.n_agents):
            assert exp[i] == pytest.approx(
                res.vcg_payments[i], abs=1e-7 * max(1.0, abs(res.vcg_payments[i]))
            )
        total_weight = sum(o.weight for o in res.outcomes)
        assert total_weight == pytest.approx(1.0, abs=1e-8)
        for o in res.outcomes:
            for i in range(inst.n_agents):
                realized = sum(
                    inst.open_costs[l]
                    for l in inst.agent_facilities[i]
                    if l in o.open_facilities
                )
                assert o.payments[i] >= realized - 1e-9
        # Expected total cost stays within rho times the relaxation value.
        expected_cost = sum(
            o.weight
            * (
                sum(inst.open_costs[l] for l in o.open_facilities)
                + sum(inst.assign[o.sigma[j]][j] for j in range(inst.n_clients))
            )
            for o in res.outcomes
        )
        assert expected_cost <= RHO * res.fractional_value + 1e-6


def test_sampled_mechanism_is_seed_deterministic():
    inst = fractional_triangle(seed=4)
    a = run_ufl_mechanism(inst, seed=11)
    b = run_ufl_mechanism(inst, seed=11)
    assert a.chosen == b.chosen
    assert a.outcomes == b.outcomes
    c = run_ufl_mechanism(inst, seed=12, fallback_enum=True)
    assert sum(o.weight for o in c.outcomes) == pytest.approx(1.0, abs=1e-8)


def test_misreporting_open_costs_never_helps():
    rng = random.Random(239)
    for _ in range(4):
        inst = random_ufl_instance(3, 4, seed=rng.randrange(10**6), n_agents=3)
        res_true = run_ufl_mechanism(inst, seed=0)
        for i in range(inst.n_agents):
            mine = inst.agent_facilities[i]
            exp_true = res_true.expected_payments()[i] - sum(
                res_true.y_star[l] * inst.open_costs[l] for l in mine
            )
            for factor in (0.25, 0.5, 0.75, 1.5, 2.0, 4.0):
                lie = list(inst.open_costs)
                for l in mine:
                    lie[l] = inst.open_costs[l] * factor
                res_lie = run_ufl_mechanism(inst.with_open_costs(tuple(lie)), seed=0)
                exp_lie = res_lie.expected_payments()[i] - sum(
                    res_lie.y_star[l] * inst.open_costs[l] for l in mine
                )
                assert exp_lie <= exp_true + 1e-7
