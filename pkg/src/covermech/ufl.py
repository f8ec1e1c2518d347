"""Truthful-in-expectation mechanism for metric uncapacitated facility location.

Facilities are owned by agents whose opening costs are private; connection
costs are public.  The mechanism solves the fractional relaxation, charges
fractional VCG payments, decomposes the fractional opening vector into a
distribution over integer solutions whose expected connection cost is within
a factor two of the fractional connection cost, samples one, and scales the
VCG payment by the realized share of the fractional opening cost.  Expected
payments match the fractional VCG payments exactly, which is what makes the
sampled mechanism truthful in expectation.

The integer columns come from a dual-ascent heuristic with a certified
cost guarantee: twice the opening cost plus the connection cost never
exceeds twice the fractional optimum.  That certificate is what lets column
generation terminate with the required distribution.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

from .errors import (
    CovermechError,
    LMPCertificateError,
    LoopGuardError,
    MechanismPreconditionError,
    SizeLimitError,
)
from .instances import UFLInstance
from .lp import LinearProgram, solve_lp

__all__ = [
    "RHO",
    "FractionalSolution",
    "fractional_connect_cost",
    "solve_fractional",
    "solve_flp",
    "fractional_vcg_payments",
    "jms_dual_ascent",
    "jms_lmp",
    "nearest_assignment",
    "solution_cost",
    "lmp_certificate",
    "UFLColumn",
    "convex_decompose",
    "enumerate_decompose",
    "master_value",
    "UFLOutcome",
    "UFLMechanismResult",
    "run_ufl_mechanism",
]

RHO = 2.0
_PRICING_TOL = 1e-7
_MAX_COLUMNS = 500


# ---------------------------------------------------------------------------
# fractional relaxation


def _ufl_lp(open_costs, assign, facilities) -> LinearProgram:
    """min sum f_l y_l + sum c_lj x_lj  s.t.  sum_l x_lj >= 1,  x_lj <= y_l."""
    nf = len(facilities)
    nc = len(assign[0]) if assign else 0
    nvars = nf + nf * nc

    def xi(li, j):
        return nf + li * nc + j

    objective = [0.0] * nvars
    for li, l in enumerate(facilities):
        objective[li] = float(open_costs[l])
        for j in range(nc):
            objective[xi(li, j)] = float(assign[l][j])
    rows = []
    for j in range(nc):
        coeffs = [0.0] * nvars
        for li in range(nf):
            coeffs[xi(li, j)] = 1.0
        rows.append((coeffs, ">=", 1.0))
    for li in range(nf):
        for j in range(nc):
            coeffs = [0.0] * nvars
            coeffs[xi(li, j)] = 1.0
            coeffs[li] = -1.0
            rows.append((coeffs, "<=", 0.0))
    return LinearProgram(sense="min", objective=objective, rows=rows)


@dataclass(frozen=True)
class FractionalSolution:
    """Optimal fractional solution: objective value, opening vector y indexed
    by facility id, and assignment matrix x indexed [facility][client]."""

    value: float
    y: tuple[float, ...]
    x: tuple[tuple[float, ...], ...]


def fractional_connect_cost(inst: UFLInstance, frac: FractionalSolution) -> float:
    """Connection part of the fractional objective: sum c_lj * x_lj."""
    return sum(
        float(inst.assign[l][j]) * frac.x[l][j]
        for l in range(inst.n_facilities)
        for j in range(inst.n_clients)
    )


def solve_flp(inst: UFLInstance) -> FractionalSolution:
    """Solve the fractional relaxation and bundle the result."""
    value, y, x = solve_fractional(inst)
    return FractionalSolution(value, tuple(y), tuple(tuple(row) for row in x))


def solve_fractional(inst: UFLInstance, facilities=None, open_costs=None):
    """Optimal fractional solution; returns (value, y, x) with y indexed by
    facility id (zero outside the allowed subset)."""
    if facilities is None:
        facilities = list(range(inst.n_facilities))
    if not facilities:
        raise MechanismPreconditionError("no facility available; cannot serve clients")
    if open_costs is None:
        open_costs = inst.open_costs
    sol = solve_lp(_ufl_lp(open_costs, inst.assign, facilities))
    nf = len(facilities)
    nc = inst.n_clients
    y = [0.0] * inst.n_facilities
    x = [[0.0] * nc for _ in range(inst.n_facilities)]
    for li, l in enumerate(facilities):
        y[l] = min(1.0, max(0.0, float(sol.x[li])))
        for j in range(nc):
            x[l][j] = max(0.0, float(sol.x[nf + li * nc + j]))
    return float(sol.value), y, x


def fractional_vcg_payments(inst: UFLInstance, value=None, y=None) -> list[float]:
    """Per-agent externality payment against the fractional optimum.

    Agent i receives (optimum with i's facilities unavailable) minus the
    cost the optimum imposes on everyone else.  Always at least the agent's
    fractional opening cost, so participation never hurts.  The fractional
    solve runs internally when `value`/`y` are omitted.
    """
    if value is None or y is None:
        value, y, _x = solve_fractional(inst)
    payments = []
    for i in range(inst.n_agents):
        mine = set(inst.agent_facilities[i])
        others = [l for l in range(inst.n_facilities) if l not in mine]
        if not others:
            raise MechanismPreconditionError(
                f"agent {i} owns every facility; externality payment undefined"
            )
        value_without, _y, _x = solve_fractional(inst, facilities=others)
        own_share = sum(float(inst.open_costs[l]) * y[l] for l in mine)
        payments.append(value_without - (value - own_share))
    return payments


# ---------------------------------------------------------------------------
# dual-ascent heuristic


def jms_dual_ascent(inst: UFLInstance, open_costs=None):
    """Greedy dual ascent: clients raise their offers in lockstep, a facility
    opens when the offers aimed at it cover its opening cost, clients connect
    to open facilities as soon as one is within reach and switch only for a
    strict improvement.  Deterministic; simultaneous events resolve in index
    order.  Returns (open facility list, assignment, offer levels)."""
    f = [float(v) for v in (open_costs if open_costs is not None else inst.open_costs)]
    nf = len(f)
    nc = inst.n_clients
    c = [[float(inst.assign[l][j]) for j in range(nc)] for l in range(nf)]
    if nf == 0:
        raise MechanismPreconditionError("no facility available")
    conn = [-1] * nc
    alpha = [0.0] * nc
    is_open = [False] * nf
    t = 0.0
    for _step in range(nf + nc + 1):
        if all(ci >= 0 for ci in conn):
            break
        unconn = [j for j in range(nc) if conn[j] < 0]
        best = None  # (time, priority, index); openings before connections
        for l in range(nf):
            if is_open[l]:
                continue
            paid_fixed = sum(
                max(c[conn[j]][j] - c[l][j], 0.0) for j in range(nc) if conn[j] >= 0
            )
            topen = _opening_time(f[l] - paid_fixed, sorted(c[l][j] for j in unconn), t)
            if topen is not None:
                best = _earlier_event(best, (topen, 0, l))
        for j in unconn:
            reach = [c[l][j] for l in range(nf) if is_open[l]]
            if reach:
                best = _earlier_event(best, (max(min(reach), t), 1, j))
        if best is None:
            raise CovermechError("dual ascent stalled; no reachable facility")
        t = best[0]
        best_event = (best[1], best[2])
        if best_event[0] == 0:
            l = best_event[1]
            is_open[l] = True
            for j in range(nc):
                if conn[j] < 0:
                    if c[l][j] <= t + 1e-12:
                        conn[j] = l
                        alpha[j] = t
                else:
                    if c[l][j] < c[conn[j]][j] - 1e-12:
                        conn[j] = l
        else:
            j = best_event[1]
            cands = [l for l in range(nf) if is_open[l] and c[l][j] <= t + 1e-12]
            conn[j] = min(cands, key=lambda l: (c[l][j], l))
            alpha[j] = t
    if any(ci < 0 for ci in conn):
        raise CovermechError("dual ascent did not connect every client")
    opened = [l for l in range(nf) if is_open[l]]
    return opened, tuple(conn), alpha


def _earlier_event(best, cand):
    """Earlier time wins; within tolerance, openings beat connections and
    lower indices beat higher."""
    if best is None:
        return cand
    if cand[0] < best[0] - 1e-12:
        return cand
    if cand[0] > best[0] + 1e-12:
        return best
    return cand if (cand[1], cand[2]) < (best[1], best[2]) else best


def _opening_time(deficit: float, reach_costs, now: float):
    """Earliest time at or after `now` when growing offers cover `deficit`.
    Offers grow at unit rate per client once time passes its cost."""
    if deficit <= 1e-12:
        return now
    total = 0.0
    k = 0
    costs = list(reach_costs) + [math.inf]
    for idx in range(len(costs) - 1):
        k = idx + 1
        lo = costs[idx]
        hi = costs[idx + 1]
        # with k active clients, paid at time T in [lo, hi) is total + k*(T - lo)
        need = lo + (deficit - total) / k
        if need <= hi:
            return max(need, now)
        total += k * (hi - lo)
    return None


def jms_lmp(inst: UFLInstance):
    """Dual-ascent solution as (open facility list, assignment)."""
    opened, sigma, _alpha = jms_dual_ascent(inst)
    return opened, sigma


def nearest_assignment(inst: UFLInstance, open_facilities) -> tuple[int, ...]:
    opens = sorted(open_facilities)
    if not opens:
        raise CovermechError("cannot assign clients with no open facility")
    out = []
    for j in range(inst.n_clients):
        out.append(min(opens, key=lambda l: (float(inst.assign[l][j]), l)))
    return tuple(out)


def solution_cost(inst: UFLInstance, open_facilities, sigma, open_costs=None):
    f = open_costs if open_costs is not None else inst.open_costs
    fcost = sum(float(f[l]) for l in open_facilities)
    ccost = sum(float(inst.assign[sigma[j]][j]) for j in range(inst.n_clients))
    return fcost, ccost


def lmp_certificate(
    inst: UFLInstance, open_facilities, sigma, rho=RHO, lp_value=None, tol=1e-7
) -> bool:
    """True when rho * opening + connection <= rho * fractional optimum.

    This is the cost guarantee the decomposition relies on; a solution that
    opens wasteful extra facilities fails it and gets False, never an
    exception.
    """
    if lp_value is None:
        lp_value, _y, _x = solve_fractional(inst)
    fcost, ccost = solution_cost(inst, open_facilities, sigma)
    lhs = rho * fcost + ccost
    rhs = rho * lp_value
    return lhs <= rhs + tol * max(1.0, abs(rhs))


# ---------------------------------------------------------------------------
# convex decomposition of the fractional opening vector


@dataclass(frozen=True)
class UFLColumn:
    open_facilities: tuple[int, ...]
    sigma: tuple[int, ...]
    open_cost: float
    connect_cost: float
    rho: float = RHO

    @property
    def scaled_cost(self) -> float:
        return self.rho * self.open_cost + self.connect_cost


def _make_column(inst: UFLInstance, open_set, rho=RHO) -> UFLColumn:
    opens = tuple(sorted(set(open_set)))
    sigma = nearest_assignment(inst, opens)
    fcost, ccost = solution_cost(inst, opens, sigma)
    return UFLColumn(opens, sigma, fcost, ccost, rho)


def _solve_master(inst: UFLInstance, columns, y_star, big: float | None):
    """Master LP: mix columns to reproduce y_star exactly while minimising
    the scaled cost.  With `big` set, paired deviation variables keep the
    master feasible before enough columns exist."""
    nf = inst.n_facilities
    ncols = len(columns)
    ndev = 2 * nf if big is not None else 0
    nvars = ncols + ndev
    objective = [col.scaled_cost for col in columns] + [big] * ndev
    rows = []
    coeffs = [1.0] * ncols + [0.0] * ndev
    rows.append((coeffs, "==", 1.0))
    for l in range(nf):
        coeffs = [0.0] * nvars
        for q, col in enumerate(columns):
            if l in col.open_facilities:
                coeffs[q] = 1.0
        if big is not None:
            coeffs[ncols + 2 * l] = 1.0
            coeffs[ncols + 2 * l + 1] = -1.0
        rows.append((coeffs, "==", y_star[l]))
    sol = solve_lp(LinearProgram(sense="min", objective=objective, rows=rows), exact=False)
    lam = [float(sol.x[q]) for q in range(ncols)]
    deviation = sum(float(sol.x[ncols + d]) for d in range(ndev))
    duals = [float(v) for v in sol.dual]
    return lam, deviation, duals, float(sol.value)


def _price_column(inst: UFLInstance, alpha, alg, rho) -> UFLColumn:
    """Best integer response to master duals: facilities whose dual rebate
    exceeds their scaled opening cost open for free, the rest keep cost
    (rho*f - alpha)/rho, and the pricing algorithm fills in the rest."""
    nf = inst.n_facilities
    free = [l for l in range(nf) if rho * float(inst.open_costs[l]) - alpha[l] <= 0.0]
    mod = [
        max(rho * float(inst.open_costs[l]) - alpha[l], 0.0) / rho for l in range(nf)
    ]
    opened, _sigma = alg(inst.with_open_costs(mod))
    return _make_column(inst, set(opened) | set(free), rho)


def convex_decompose(inst: UFLInstance, frac=None, alg=None, rho=RHO, tol=1e-6):
    """Distribution over integer solutions matching the fractional openings.

    Returns (weights, columns).  The weights sum to one, their mix of
    opening vectors equals the fractional openings coordinate-wise, and the
    expected connection cost is at most rho times the fractional connection
    cost.  Column generation against the master LP; the pricing oracle runs
    `alg` (dual ascent by default) on rebated opening costs.
    """
    if frac is None:
        frac = solve_flp(inst)
    if alg is None:
        alg = jms_lmp
    y_star = frac.y
    nf = inst.n_facilities
    if all(min(v, 1.0 - v) <= 1e-9 for v in y_star):
        opens = tuple(l for l in range(nf) if y_star[l] > 0.5)
        return [1.0], [_make_column(inst, opens, rho)]
    scale = max(1.0, abs(frac.value))
    big = 1e7 * scale
    columns = [
        _make_column(inst, alg(inst)[0], rho),
        _make_column(inst, range(nf), rho),
    ]
    seen = {col.open_facilities for col in columns}
    for _round in range(_MAX_COLUMNS):
        lam, deviation, duals, _value = _solve_master(inst, columns, y_star, big)
        alpha = duals[1 : 1 + nf]
        beta = duals[0]
        cand = _price_column(inst, alpha, alg, rho)
        reduced = cand.scaled_cost - beta - sum(alpha[l] for l in cand.open_facilities)
        fresh = cand.open_facilities not in seen
        if (reduced >= -_PRICING_TOL * scale or not fresh) and deviation <= 1e-7:
            break
        if not fresh:
            raise LMPCertificateError(
                "pricing repeated a column before the master converged; the "
                "pricing algorithm does not meet the rho-scaled cost guarantee"
            )
        columns.append(cand)
        seen.add(cand.open_facilities)
    else:
        raise LoopGuardError(f"column generation exceeded {_MAX_COLUMNS} rounds")
    return _finish_decomposition(inst, columns, lam, frac, rho, tol)


def enumerate_decompose(inst: UFLInstance, frac=None, rho=RHO, tol=1e-6):
    """Exact fallback: master over every non-empty facility subset."""
    if frac is None:
        frac = solve_flp(inst)
    nf = inst.n_facilities
    if nf > 8:
        raise SizeLimitError("enumeration fallback capped at 8 facilities")
    columns = []
    for k in range(1, nf + 1):
        for subset in combinations(range(nf), k):
            columns.append(_make_column(inst, subset, rho))
    lam, _dev, _duals, _value = _solve_master(inst, columns, frac.y, big=None)
    return _finish_decomposition(inst, columns, lam, frac, rho, tol)


def _finish_decomposition(inst, columns, lam, frac, rho, tol):
    kept = [(w, col) for w, col in zip(lam, columns) if w > 1e-12]
    total = sum(w for w, _c in kept)
    if not kept or abs(total - 1.0) > 1e-6:
        raise CovermechError(f"decomposition weights sum to {total}, expected 1")
    weights = [w / total for w, _c in kept]
    cols = [c for _w, c in kept]
    nf = inst.n_facilities
    for l in range(nf):
        mixed = sum(w for w, c in zip(weights, cols) if l in c.open_facilities)
        if abs(mixed - frac.y[l]) > tol:
            raise CovermechError(
                f"decomposition misses fractional opening of facility {l}: "
                f"{mixed} vs {frac.y[l]}"
            )
    frac_connect = fractional_connect_cost(inst, frac)
    mixed_connect = sum(w * c.connect_cost for w, c in zip(weights, cols))
    if mixed_connect > rho * frac_connect + tol * max(1.0, frac_connect):
        raise CovermechError(
            f"expected connection cost {mixed_connect} exceeds "
            f"{rho} * fractional {frac_connect}"
        )
    return weights, cols


def master_value(inst: UFLInstance, columns, frac, rho=RHO, coord_tol=1e-6):
    """Optimum of the normalized restricted master over the given columns.

    Maximise the total weight subject to: the weighted mix of opening
    vectors reproduces the fractional openings (within `coord_tol` per
    coordinate), the weighted connection cost stays below rho times the
    fractional connection cost, and the total weight is at most one.  A
    column set rich enough to express the fractional solution scores exactly
    1; dropping a needed column or breaking the cost cap pushes the value
    below 1 (or makes the program infeasible, reported as 0).
    """
    ncols = len(columns)
    if ncols == 0:
        return 0.0
    frac_connect = fractional_connect_cost(inst, frac)
    rows = []
    for l in range(inst.n_facilities):
        coeffs = [1.0 if l in col.open_facilities else 0.0 for col in columns]
        rows.append((coeffs, "<=", frac.y[l] + coord_tol))
        rows.append((coeffs, ">=", frac.y[l] - coord_tol))
    cost_row = [col.connect_cost for col in columns]
    rows.append((cost_row, "<=", rho * frac_connect + coord_tol * max(1.0, frac_connect)))
    rows.append(([1.0] * ncols, "<=", 1.0))
    sol = solve_lp(
        LinearProgram(sense="max", objective=[1.0] * ncols, rows=rows), exact=False
    )
    if sol.status != "optimal":
        return 0.0
    return float(sol.value)


# ---------------------------------------------------------------------------
# the sampled mechanism


@dataclass(frozen=True)
class UFLOutcome:
    weight: float
    open_facilities: tuple[int, ...]
    sigma: tuple[int, ...]
    payments: tuple[float, ...]


@dataclass(frozen=True)
class UFLMechanismResult:
    fractional_value: float
    y_star: tuple[float, ...]
    vcg_payments: tuple[float, ...]
    outcomes: tuple[UFLOutcome, ...]
    chosen: int

    @property
    def realized(self) -> UFLOutcome:
        return self.outcomes[self.chosen]

    def expected_payments(self) -> list[float]:
        n = len(self.vcg_payments)
        return [
            sum(o.weight * o.payments[i] for o in self.outcomes) for i in range(n)
        ]


def run_ufl_mechanism(inst: UFLInstance, seed: int = 0, fallback_enum: bool = False):
    """Solve, price, decompose, and sample one integer outcome.

    Realized payments scale each agent's externality payment by the share of
    its fractional opening cost that the sampled outcome realizes, so the
    expectation over the sampling equals the externality payment exactly.
    """
    frac = solve_flp(inst)
    value, y_star = frac.value, frac.y
    vcg = fractional_vcg_payments(inst, value, y_star)
    if fallback_enum:
        weights, cols = enumerate_decompose(inst, frac)
    else:
        weights, cols = convex_decompose(inst, frac)
    outcomes = []
    for w, col in zip(weights, cols):
        pays = []
        for i in range(inst.n_agents):
            mine = inst.agent_facilities[i]
            denom = sum(float(inst.open_costs[l]) * y_star[l] for l in mine)
            realized = sum(
                float(inst.open_costs[l]) for l in mine if l in col.open_facilities
            )
            pays.append(0.0 if denom <= 0.0 else realized * vcg[i] / denom)
        outcomes.append(UFLOutcome(w, col.open_facilities, col.sigma, tuple(pays)))
    rng = random.Random(seed)
    draw = rng.random()
    acc = 0.0
    chosen = len(outcomes) - 1
    for idx, o in enumerate(outcomes):
        acc += o.weight
        if draw <= acc:
            chosen = idx
            break
    return UFLMechanismResult(
        fractional_value=value,
        y_star=tuple(y_star),
        vcg_payments=tuple(vcg),
        outcomes=tuple(outcomes),
        chosen=chosen,
    )
