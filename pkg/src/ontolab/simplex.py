"""Dense two-phase simplex with Bland's rule.

Small, deterministic, and self-contained on purpose: the LPs in this
package have at most a few dozen variables, and reproducible pivoting
matters more than speed.  Entering variable: lowest index with a reduced
cost below -tol.  Leaving variable: minimum ratio, ties broken by lowest
basis-variable index (Bland's anti-cycling rule).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, UnboundedError

Array = np.ndarray

_PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class LpSolution:
    x: Array
    value: float


def _pivot(tableau: Array, basis: list[int], row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and abs(tableau[r, col]) > 1e-14:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _reduce_cost(c: Array, tableau: Array, basis: list[int]) -> Array:
    # Reduced cost row: c - c_B . B^{-1} A, computed from the tableau.
    cost = c.astype(float).copy()
    for r, b in enumerate(basis):
        if abs(cost[b]) > 1e-14:
            cost -= cost[b] * tableau[r, :-1]
    return cost


def _simplex_iterate(tableau: Array, basis: list[int], c: Array) -> None:
    n_cols = tableau.shape[1] - 1
    while True:
        cost = _reduce_cost(c, tableau, basis)
        entering = -1
        for j in range(n_cols):
            if cost[j] < -_PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return
        ratios = []
        for r in range(tableau.shape[0]):
            a = tableau[r, entering]
            if a > _PIVOT_TOL:
                ratios.append((tableau[r, -1] / a, basis[r], r))
        if not ratios:
            raise UnboundedError("objective unbounded along entering column")
        _, _, row = min(ratios, key=lambda t: (t[0], t[1]))
        _pivot(tableau, basis, row, entering)


def solve_lp(
    c,
    a_eq=None,
    b_eq=None,
    a_ub=None,
    b_ub=None,
    maximize: bool = False,
    row_names: list[str] | None = None,
) -> LpSolution:
    """Solve min (or max) c.x subject to a_eq x = b_eq, a_ub x <= b_ub, x >= 0.

    Raises InfeasibleError (naming an offending constraint row when one can
    be identified) or UnboundedError.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    rows = []
    rhs = []
    names = []
    if a_eq is not None:
        a_eq = np.asarray(a_eq, dtype=float).reshape(-1, n)
        b_eq = np.asarray(b_eq, dtype=float).reshape(-1)
        for i in range(a_eq.shape[0]):
            rows.append((a_eq[i], 0.0))
            rhs.append(b_eq[i])
            names.append(row_names[i] if row_names else f"eq[{i}]")
    n_eq = len(rows)
    if a_ub is not None:
        a_ub = np.asarray(a_ub, dtype=float).reshape(-1, n)
        b_ub = np.asarray(b_ub, dtype=float).reshape(-1)
        for i in range(a_ub.shape[0]):
            rows.append((a_ub[i], 1.0))
            rhs.append(b_ub[i])
            base = n_eq + i
            names.append(row_names[base] if row_names and base < len(row_names) else f"ub[{i}]")
    if not rows:
        raise ValueError("LP needs at least one constraint")

    m = len(rows)
    n_slack = sum(1 for _, s in rows if s)
    total = n + n_slack + m  # structural + slack + artificial
    tableau = np.zeros((m, total + 1))
    slack_at = 0
    for r, ((row, has_slack), b) in enumerate(zip(rows, rhs)):
        sign = 1.0 if b >= 0 else -1.0
        tableau[r, :n] = sign * row
        if has_slack:
            tableau[r, n + slack_at] = sign
            slack_at += 1
        tableau[r, -1] = sign * b

    basis = []
    for r in range(m):
        tableau[r, n + n_slack + r] = 1.0
        basis.append(n + n_slack + r)

    # Phase 1: minimize the artificial mass.
    c_phase1 = np.zeros(total)
    c_phase1[n + n_slack:] = 1.0
    _simplex_iterate(tableau, basis, c_phase1)
    infeas = sum(tableau[r, -1] for r in range(m) if basis[r] >= n + n_slack)
    if infeas > 1e-7:
        worst = max(
            (r for r in range(m) if basis[r] >= n + n_slack),
            key=lambda r: tableau[r, -1],
        )
        raise InfeasibleError(
            f"constraints admit no solution (residual {infeas:.3e})",
            constraint=names[basis[worst] - (n + n_slack)],
        )
    # Drive leftover artificials out of the basis, dropping redundant rows.
    keep = []
    for r in range(m):
        if basis[r] >= n + n_slack:
            pivot_col = next(
                (j for j in range(n + n_slack) if abs(tableau[r, j]) > _PIVOT_TOL), None
            )
            if pivot_col is None:
                continue  # redundant row
            _pivot(tableau, basis, r, pivot_col)
        keep.append(r)
    if len(keep) < m:
        tableau = tableau[keep]
        basis = [basis[r] for r in keep]
        m = len(keep)

    # Phase 2 on structural + slack columns only.
    c_full = np.zeros(total)
    c_full[:n] = -c if maximize else c
    tableau2 = np.delete(tableau, np.s_[n + n_slack : total], axis=1)
    basis2 = list(basis)
    _simplex_iterate(tableau2, basis2, c_full[: n + n_slack])

    x = np.zeros(n + n_slack)
    for r, b in enumerate(basis2):
        x[b] = tableau2[r, -1]
    solution = x[:n]
    value = float(c @ solution)
    return LpSolution(x=solution, value=value)


def lexicographically_smallest_optimum(
    c,
    a_eq=None,
    b_eq=None,
    a_ub=None,
    b_ub=None,
    maximize: bool = False,
    row_names: list[str] | None = None,
) -> LpSolution:
    """Among optimal solutions, return the lexicographically smallest vector.

    Solves the LP once for the optimal value, then fixes the objective and
    minimizes each coordinate in turn.  Intended for degenerate instances
    where test reproducibility matters.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    first = solve_lp(c, a_eq, b_eq, a_ub, b_ub, maximize=maximize, row_names=row_names)
    eq_rows = [] if a_eq is None else [np.asarray(a_eq, dtype=float).reshape(-1, n)]
    eq_rhs = [] if b_eq is None else [np.asarray(b_eq, dtype=float).reshape(-1)]
    eq_rows.append(c.reshape(1, -1))
    eq_rhs.append(np.array([first.value]))
    fixed: list[float] = []
    for i in range(n):
        obj = np.zeros(n)
        obj[i] = 1.0
        sol = solve_lp(
            obj,
            np.vstack(eq_rows),
            np.concatenate(eq_rhs),
            a_ub,
            b_ub,
            maximize=False,
        )
        vi = max(0.0, sol.value)
        row = np.zeros(n)
        row[i] = 1.0
        eq_rows.append(row.reshape(1, -1))
        eq_rhs.append(np.array([vi]))
        fixed.append(vi)
    x = np.array(fixed)
    return LpSolution(x=x, value=float(c @ x))
