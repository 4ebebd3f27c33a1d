"""Exact LP cross-check for the equality-constrained decoder.

min ||x||_1 s.t. Ax = y is rewritten with the positive/negative split
x = p - q, p, q >= 0 and solved by a dense two-phase tableau simplex.
The entering rule is Dantzig's (most negative reduced cost) until the
objective stalls on degenerate vertices, after which it permanently
switches to Bland's smallest-index rule, which cannot cycle; ratio ties
always break toward the smallest basic index.  The cost row is refreshed
from the basis at intervals so rounding error cannot accumulate into
phantom negative reduced costs.  Intended for desk-scale instances; the
tableau is dense.
"""

import time

import numpy as np

from .errors import CyclingGuardExceeded, Infeasible
from .solver import RecoveryInstance, RecoveryResult, Status

_PIVOT_TOL = 1e-9
_COST_TOL = 1e-9
_STALL_LIMIT = 50
_REFRESH_EVERY = 200


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and abs(tableau[r, col]) > 1e-14:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _refresh_cost_row(tableau, basis, cost):
    tableau[-1, :] = cost
    for r, var in enumerate(basis):
        if cost[var] != 0.0:
            tableau[-1] -= cost[var] * tableau[r]


def _run_phase(tableau, basis, cost, n_real, max_pivots, pivots_done):
    """Pivot to optimality for the given cost vector; returns pivot count."""
    _refresh_cost_row(tableau, basis, cost)
    pivots = pivots_done
    stalled = 0
    use_bland = False
    while True:
        if pivots - pivots_done > 0 and (pivots - pivots_done) % _REFRESH_EVERY == 0:
            _refresh_cost_row(tableau, basis, cost)
        red = tableau[-1, :n_real]
        if use_bland:
            negatives = np.where(red < -_COST_TOL)[0]
            if negatives.size == 0:
                return pivots
            enter = int(negatives[0])
        else:
            enter = int(np.argmin(red))
            if red[enter] >= -_COST_TOL:
                return pivots
        column = tableau[:-1, enter]
        rhs = tableau[:-1, -1]
        eligible = column > _PIVOT_TOL
        if not eligible.any():
            raise RuntimeError("LP unbounded; cannot happen for an l1 objective")
        ratios = np.where(eligible, rhs / np.where(eligible, column, 1.0), np.inf)
        best = ratios.min()
        # Smallest basic index among the tied minimal ratios.
        tied = np.where(ratios <= best + 1e-12)[0]
        leave = int(min(tied, key=lambda r: basis[r]))
        before = tableau[-1, -1]
        _pivot(tableau, basis, leave, enter)
        pivots += 1
        # The cost-row RHS is minus the objective, so progress raises it.
        if tableau[-1, -1] <= before + 1e-13:
            stalled += 1
            if stalled > _STALL_LIMIT:
                use_bland = True
        else:
            stalled = 0
        if pivots > max_pivots:
            raise CyclingGuardExceeded(f"exceeded {max_pivots} pivots")


def simplex_min_l1(A: np.ndarray, y: np.ndarray, max_pivots: int | None = None):
    """Solve min 1'(p+q) s.t. A(p-q) = y, p, q >= 0; returns (x, objective,
    pivot count)."""
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    m, n = A.shape
    if max_pivots is None:
        max_pivots = 50_000 + 200 * (m + n)

    # Rows flipped so the right-hand side is nonnegative.
    signs = np.where(y < 0, -1.0, 1.0)
    Aeq = np.hstack([A, -A]) * signs[:, None]
    b = y * signs
    n_var = 2 * n

    tableau = np.zeros((m + 1, n_var + m + 1))
    tableau[:m, :n_var] = Aeq
    tableau[:m, n_var:n_var + m] = np.eye(m)
    tableau[:m, -1] = b
    basis = list(range(n_var, n_var + m))

    # Phase 1: minimize the artificial sum.
    cost1 = np.zeros(tableau.shape[1])
    cost1[n_var:n_var + m] = 1.0
    pivots = _run_phase(tableau, basis, cost1, n_var, max_pivots, 0)
    _refresh_cost_row(tableau, basis, cost1)
    if tableau[-1, -1] < -1e-7 * max(1.0, float(np.abs(b).sum())):
        raise Infeasible("y is not in the range of A")

    # Drive leftover artificials out; rows with no real coefficient are
    # redundant constraints and get dropped.
    drop = []
    for r in range(m):
        if basis[r] >= n_var:
            cols = np.where(np.abs(tableau[r, :n_var]) > _PIVOT_TOL)[0]
            if cols.size:
                _pivot(tableau, basis, r, int(cols[0]))
                pivots += 1
            else:
                drop.append(r)
    if drop:
        keep = [r for r in range(m) if r not in drop] + [m]
        tableau = tableau[keep]
        basis = [basis[r] for r in range(m) if r not in drop]
        m = len(basis)

    # Phase 2: the true objective.
    cost2 = np.zeros(tableau.shape[1])
    cost2[:n_var] = 1.0
    pivots = _run_phase(tableau, basis, cost2, n_var, max_pivots, pivots)

    solution = np.zeros(n_var)
    for r, var in enumerate(basis):
        if var < n_var:
            solution[var] = tableau[r, -1]
    x = solution[:n] - solution[n:]
    return x, float(solution.sum()), pivots


def lp_oracle(instance: RecoveryInstance, max_pivots: int | None = None) -> RecoveryResult:
    """Exact-reformulation solve of the eps = 0 decoder."""
    if instance.epsilon != 0.0:
        raise ValueError("the LP oracle handles only epsilon = 0")
    A = instance.A.toarray()
    if A.size > 2_000_000:
        raise ValueError(f"instance too large for the dense oracle: {A.shape}")
    start = time.perf_counter()
    x, objective, pivots = simplex_min_l1(A, instance.y, max_pivots)
    return RecoveryResult(
        x_hat=x,
        l1_objective=objective,
        residual_norm=float(np.linalg.norm(instance.y - A @ x)),
        iterations=pivots,
        status=Status.CONVERGED,
        wall_time=time.perf_counter() - start,
    )
