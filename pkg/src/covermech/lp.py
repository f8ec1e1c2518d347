"""Dense two-phase simplex with exact and floating-point modes.

The solver prefers exact Fraction arithmetic when every coefficient converts
to a rational with a small denominator and the tableau is small; this keeps
hand-built rational fixtures exact.  Larger or irrational-valued programs run
on a numpy float tableau.  Either way the returned solution carries row duals
and is self-checked: primal feasibility, dual feasibility and a duality gap
below 1e-7 (exactly zero in exact mode), raising LPError otherwise.

Pivoting is deterministic: largest-violation entering column with lowest-index
tie-breaks, leaving row by minimum ratio with ties broken toward the smallest
basis variable, and a permanent switch to Bland's rule after a long run of
degenerate pivots so cycling cannot occur.

Dual sign convention, for a minimization problem: duals of >= rows are
nonnegative, duals of <= rows are nonpositive, duals of == rows are free, and
b . y equals the optimal value.  For maximization the signs flip (duals of <=
rows are nonnegative).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LPError

__all__ = ["LinearProgram", "LPSolution", "solve_lp", "lp_solve"]

MAX_EXACT_DENOMINATOR = 10**6
MAX_EXACT_CELLS = 20000
FLOAT_TOL = 1e-9
STALL_LIMIT = 400

_RELATIONS = ("<=", ">=", "==")


@dataclass(frozen=True)
class LinearProgram:
    """sense is "min" or "max"; rows are (coefficients, relation, rhs);
    variables are nonnegative unless flagged free."""

    sense: str
    objective: tuple
    rows: tuple
    free: tuple = ()

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise LPError(f"unknown sense {self.sense!r}")
        nv = len(self.objective)
        for coeffs, rel, _rhs in self.rows:
            if len(coeffs) != nv:
                raise LPError("constraint width does not match objective")
            if rel not in _RELATIONS:
                raise LPError(f"unknown relation {rel!r}")
        if self.free and len(self.free) != nv:
            raise LPError("free flags must cover every variable")

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def is_free(self, j: int) -> bool:
        return bool(self.free) and bool(self.free[j])


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple | None = None
    value: object = None
    dual: tuple | None = None
    exact: bool = False


def _as_fraction(v) -> Fraction | None:
    if isinstance(v, Fraction):
        f = v
    elif isinstance(v, int):
        f = Fraction(v)
    elif isinstance(v, float):
        f = Fraction(v)
    else:
        return None
    return f if f.denominator <= MAX_EXACT_DENOMINATOR else None


def _exact_candidate(lp: LinearProgram) -> bool:
    cells = (len(lp.rows) + 1) * (lp.n_vars + len(lp.rows) + 1)
    if cells > MAX_EXACT_CELLS:
        return False
    for v in lp.objective:
        if _as_fraction(v) is None:
            return False
    for coeffs, _rel, rhs in lp.rows:
        if _as_fraction(rhs) is None:
            return False
        for v in coeffs:
            if _as_fraction(v) is None:
                return False
    return True


def _standard_form(lp: LinearProgram, conv):
    """Convert to min c.x, A x == b, x >= 0 (b possibly negative here; cores
    flip rows).  Free variables split into positive and negative parts.
    Returns (A, b, c, colmap, slack_col, row_sign_placeholder)."""
    nv = lp.n_vars
    colmap: list[tuple[int, int | None]] = []
    ncols = 0
    for j in range(nv):
        if lp.is_free(j):
            colmap.append((ncols, ncols + 1))
            ncols += 2
        else:
            colmap.append((ncols, None))
            ncols += 1
    slack_col: list[int | None] = []
    for _coeffs, rel, _rhs in lp.rows:
        if rel == "==":
            slack_col.append(None)
        else:
            slack_col.append(ncols)
            ncols += 1

    sign = 1 if lp.sense == "min" else -1
    c = [conv(0)] * ncols
    for j, (pos, neg) in enumerate(colmap):
        cj = conv(lp.objective[j])
        c[pos] = sign * cj
        if neg is not None:
            c[neg] = -sign * cj

    A = []
    b = []
    for i, (coeffs, rel, rhs) in enumerate(lp.rows):
        row = [conv(0)] * ncols
        for j, (pos, neg) in enumerate(colmap):
            aij = conv(coeffs[j])
            row[pos] = aij
            if neg is not None:
                row[neg] = -aij
        if rel == "<=":
            row[slack_col[i]] = conv(1)
        elif rel == ">=":
            row[slack_col[i]] = conv(-1)
        A.append(row)
        b.append(conv(rhs))
    return A, b, c, colmap


def _pivot_rules():
    return {"bland": False, "stall": 0, "iters": 0}


def _simplex_exact(A, b, c):
    """Exact two-phase tableau simplex.  Returns (status, x, y, basis)."""
    zero = Fraction(0)
    one = Fraction(1)
    m = len(A)
    n = len(c)
    row_sign = [one] * m
    T = []
    for i in range(m):
        row = list(A[i])
        rhs = b[i]
        if rhs < zero:
            row = [-v for v in row]
            rhs = -rhs
            row_sign[i] = -one
        row.extend([zero] * m)
        row[n + i] = one
        row.append(rhs)
        T.append(row)
    basis = list(range(n, n + m))
    width = n + m + 1

    def make_reduced(costs):
        # reduced costs r_j = c_j - sum_i c_basis[i] * T[i][j]
        r = list(costs) + [zero]
        for i in range(m):
            cb = costs[basis[i]]
            if cb != zero:
                Ti = T[i]
                for j in range(width):
                    r[j] -= cb * Ti[j]
        return r

    state = _pivot_rules()

    def run(r, allowed_max):
        while True:
            state["iters"] += 1
            if state["iters"] > 500000:
                raise LPError("simplex iteration guard exceeded")
            enter = -1
            if state["bland"]:
                for j in range(allowed_max):
                    if r[j] < zero:
                        enter = j
                        break
            else:
                best = zero
                for j in range(allowed_max):
                    if r[j] < best:
                        best = r[j]
                        enter = j
            if enter < 0:
                return "optimal"
            leave = -1
            best_ratio = None
            for i in range(m):
                a = T[i][enter]
                if a > zero:
                    ratio = T[i][-1] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leave])
                    ):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            if best_ratio == zero:
                state["stall"] += 1
                if state["stall"] > STALL_LIMIT:
                    state["bland"] = True
            else:
                state["stall"] = 0
            piv = T[leave][enter]
            Tl = T[leave]
            if piv != one:
                for j in range(width):
                    Tl[j] /= piv
            for i in range(m):
                if i != leave:
                    f = T[i][enter]
                    if f != zero:
                        Ti = T[i]
                        for j in range(width):
                            Ti[j] -= f * Tl[j]
            f = r[enter]
            if f != zero:
                for j in range(width):
                    r[j] -= f * Tl[j]
            basis[leave] = enter

    # phase 1: minimize the artificial sum
    phase1_costs = [zero] * n + [one] * m
    r = make_reduced(phase1_costs)
    status = run(r, n)  # artificials never re-enter
    if status != "optimal":
        raise LPError("phase 1 cannot be unbounded")
    if -r[-1] > zero:
        return "infeasible", None, None, None
    # drive artificial variables out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            enter = -1
            for j in range(n):
                if T[i][j] != zero:
                    enter = j
                    break
            if enter < 0:
                continue
            piv = T[i][enter]
            Ti = T[i]
            for j in range(width):
                Ti[j] /= piv
            for k in range(m):
                if k != i and T[k][enter] != zero:
                    f = T[k][enter]
                    Tk = T[k]
                    for j in range(width):
                        Tk[j] -= f * Ti[j]
            basis[i] = enter

    # phase 2
    phase2_costs = list(c) + [zero] * m
    r = make_reduced(phase2_costs)
    status = run(r, n)
    if status == "unbounded":
        return "unbounded", None, None, None
    x = [zero] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    # duals from artificial reduced costs; undo row flips
    y = [-r[n + i] * row_sign[i] for i in range(m)]
    return "optimal", x, y, basis


def _simplex_float(A, b, c):
    """Float two-phase tableau simplex; final answers recomputed from a fresh
    factorization of the optimal basis for accuracy."""
    m = len(A)
    n = len(c)
    A0 = np.array(A, dtype=float) if m else np.zeros((0, n))
    b0 = np.array(b, dtype=float)
    c0 = np.array(c, dtype=float)
    row_sign = np.ones(m)
    for i in range(m):
        if b0[i] < 0:
            row_sign[i] = -1.0
    Af = A0 * row_sign[:, None] if m else A0
    bf = b0 * row_sign
    full = np.hstack([Af, np.eye(m)]) if m else np.zeros((0, n))
    T = np.hstack([full, bf[:, None]]) if m else np.zeros((0, n + 1))
    basis = list(range(n, n + m))
    width = n + m + 1

    def make_reduced(costs):
        r = np.zeros(width)
        r[: len(costs)] = costs
        for i in range(m):
            cb = costs[basis[i]] if basis[i] < len(costs) else 0.0
            if cb != 0.0:
                r -= cb * T[i]
        return r

    state = _pivot_rules()

    def run(r, allowed_max):
        nonlocal T
        while True:
            state["iters"] += 1
            if state["iters"] > 200000:
                raise LPError("simplex iteration guard exceeded")
            if state["bland"]:
                enter = -1
                for j in range(allowed_max):
                    if r[j] < -FLOAT_TOL:
                        enter = j
                        break
            else:
                enter = int(np.argmin(r[:allowed_max])) if allowed_max else -1
                if enter >= 0 and r[enter] >= -FLOAT_TOL:
                    enter = -1
            if enter < 0:
                return "optimal"
            col = T[:, enter]
            leave = -1
            best_ratio = None
            for i in range(m):
                if col[i] > FLOAT_TOL:
                    ratio = T[i, -1] / col[i]
                    if (
                        best_ratio is None
                        or ratio < best_ratio - 1e-12
                        or (ratio < best_ratio + 1e-12 and basis[i] < basis[leave])
                    ):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            if best_ratio is not None and best_ratio <= 1e-12:
                state["stall"] += 1
                if state["stall"] > STALL_LIMIT:
                    state["bland"] = True
            else:
                state["stall"] = 0
            piv = T[leave, enter]
            T[leave] = T[leave] / piv
            fcol = T[:, enter].copy()
            fcol[leave] = 0.0
            T -= np.outer(fcol, T[leave])
            r -= r[enter] * T[leave]
            basis[leave] = enter

    phase1_costs = np.zeros(n + m)
    phase1_costs[n:] = 1.0
    r = make_reduced(phase1_costs)
    status = run(r, n)
    scale = 1.0 + float(np.max(np.abs(bf))) if m else 1.0
    if -r[-1] > 1e-7 * scale:
        return "infeasible", None, None, None
    for i in range(m):
        if basis[i] >= n:
            enter = -1
            for j in range(n):
                if abs(T[i, j]) > 1e-7:
                    enter = j
                    break
            if enter < 0:
                continue
            piv = T[i, enter]
            T[i] = T[i] / piv
            fcol = T[:, enter].copy()
            fcol[i] = 0.0
            T -= np.outer(fcol, T[i])
            basis[i] = enter

    phase2_costs = np.zeros(n + m)
    phase2_costs[:n] = c0
    r = make_reduced(phase2_costs)
    status = run(r, n)
    if status == "unbounded":
        return "unbounded", None, None, None

    # recompute the vertex and duals from the final basis, fresh
    if m:
        B = full[:, basis]
        try:
            xb = np.linalg.solve(B, bf)
            cb = phase2_costs[basis]
            y_std = np.linalg.solve(B.T, cb)
        except np.linalg.LinAlgError as exc:
            raise LPError(f"singular final basis: {exc}") from exc
    else:
        xb = np.zeros(0)
        y_std = np.zeros(0)
    x = [0.0] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = float(xb[i])
    y = [float(y_std[i] * row_sign[i]) for i in range(m)]
    return "optimal", x, y, basis


def _self_check(lp: LinearProgram, x, y, value, exact: bool) -> None:
    zero = Fraction(0) if exact else 0.0
    tol = zero if exact else 1e-7
    scale = 1.0
    if not exact:
        mags = [abs(float(v)) for v in x] + [1.0]
        scale = max(mags)
    for j, xj in enumerate(x):
        if not lp.is_free(j) and xj < -tol * scale:
            raise LPError(f"negative variable x[{j}]={xj}")
    for i, (coeffs, rel, rhs) in enumerate(lp.rows):
        lhs = sum(a * xj for a, xj in zip(coeffs, x))
        resid = lhs - rhs
        limit = zero if exact else tol * max(scale, abs(float(rhs)) + 1.0)
        if rel == "<=" and resid > limit:
            raise LPError(f"row {i} violated by {resid}")
        if rel == ">=" and resid < -limit:
            raise LPError(f"row {i} violated by {resid}")
        if rel == "==" and abs(resid) > limit:
            raise LPError(f"row {i} violated by {resid}")

    # dual checks in minimization form: duals of >= rows nonnegative, of <=
    # rows nonpositive, and reduced costs c - A^T y nonnegative
    sgn = 1 if lp.sense == "min" else -1
    ymin = [sgn * yi for yi in y]
    ytol = zero if exact else 1e-7 * max(1.0, max((abs(float(v)) for v in y), default=0.0))
    for i, (_coeffs, rel, _rhs) in enumerate(lp.rows):
        if rel == ">=" and ymin[i] < -ytol:
            raise LPError(f"dual {i} of a >= row is negative: {ymin[i]}")
        if rel == "<=" and ymin[i] > ytol:
            raise LPError(f"dual {i} of a <= row is positive: {ymin[i]}")
    cscale = 1.0 if exact else max(1.0, max((abs(float(v)) for v in lp.objective), default=0.0))
    for j in range(lp.n_vars):
        aty = sum(lp.rows[i][0][j] * ymin[i] for i in range(len(lp.rows)))
        red = sgn * lp.objective[j] - aty
        rtol = zero if exact else 1e-6 * cscale
        if red < -rtol or (lp.is_free(j) and abs(red) > rtol):
            raise LPError(f"dual infeasible at variable {j}: reduced cost {red}")

    by = sum(r[2] * yi for r, yi in zip(lp.rows, y))
    gap = abs(float(value - by))
    if gap > 1e-7 * max(1.0, abs(float(value))):
        raise LPError(f"duality gap {gap} exceeds tolerance")


def solve_lp(lp: LinearProgram, exact: bool | None = None) -> LPSolution:
    """Solve, attach duals, and self-check optimal solutions."""
    use_exact = _exact_candidate(lp) if exact is None else exact
    if use_exact:
        A, b, c, colmap = _standard_form(lp, _conv_exact)
        status, xs, ys, _basis = _simplex_exact(A, b, c)
    else:
        A, b, c, colmap = _standard_form(lp, float)
        status, xs, ys, _basis = _simplex_float(A, b, c)
    if status != "optimal":
        return LPSolution(status=status, exact=use_exact)

    x = []
    for pos, neg in colmap:
        v = xs[pos] - (xs[neg] if neg is not None else (Fraction(0) if use_exact else 0.0))
        x.append(v)
    if lp.sense == "max":
        y = [-v for v in ys]
    else:
        y = list(ys)
    value = sum(cj * xj for cj, xj in zip(lp.objective, x))
    if use_exact:
        value = Fraction(value)
        x = [Fraction(v) for v in x]
        y = [Fraction(v) for v in y]
    _self_check(lp, x, y, value, use_exact)
    return LPSolution(status="optimal", x=tuple(x), value=value, dual=tuple(y), exact=use_exact)


def _conv_exact(v) -> Fraction:
    f = _as_fraction(v)
    if f is None:
        raise LPError(f"value {v!r} not exactly representable")
    return f


# Interface alias: infeasible/unbounded programs come back as a status, never
# as an exception.
lp_solve = solve_lp
