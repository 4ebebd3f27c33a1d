"""Basis-pursuit decoder: min ||z||_1 subject to ||y - Az||_2 <= eps.

The solver is an ADMM splitting between an l1 block (soft thresholding)
and the affine-feasible block (projection through one Cholesky
factorization of A A^T, with a tiny trace-scaled ridge when that Gram
matrix is rank-deficient); for eps > 0 the residual gets its own block
and a Euclidean-ball projection.  Solves are batched column-wise so a
whole cell of phase-transition trials shares the factorization and the
per-iteration linear algebra.

Every column of a batch evolves independently (its own penalty parameter,
its own stopping decision, frozen at its own first-convergence iterate),
so a batched solve returns bit-identical results to solving each column
alone.  Nothing here draws randomness.
"""

import enum
import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import ZeroTruth
from .matrices import BinaryMatrix, DenseMatrix


class Status(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 10_000
    primal_tol: float = 1e-8
    dual_tol: float = 1e-8
    feasibility_tol: float = 1e-6
    rho_init: float = 1.0
    rho_min: float = 1e-4
    rho_max: float = 1e4
    adapt_period: int = 10
    adapt_ratio: float = 10.0
    adapt_factor: float = 2.0
    success_threshold: float = 1e-4

    def __post_init__(self):
        for name in ("primal_tol", "dual_tol", "feasibility_tol", "rho_init",
                     "rho_min", "rho_max", "success_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class RecoveryInstance:
    A: object
    y: np.ndarray
    epsilon: float = 0.0
    true_x: np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64).ravel()
        m, n = self.A.shape
        if y.shape[0] != m:
            raise ValueError(f"y has length {y.shape[0]}, matrix has {m} rows")
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        object.__setattr__(self, "y", y)
        if self.true_x is not None:
            tx = np.asarray(self.true_x, dtype=np.float64).ravel()
            if tx.shape[0] != n:
                raise ValueError(f"true_x has length {tx.shape[0]}, matrix has {n} columns")
            object.__setattr__(self, "true_x", tx)


@dataclass
class RecoveryResult:
    x_hat: np.ndarray
    l1_objective: float
    residual_norm: float
    iterations: int
    status: Status
    wall_time: float = 0.0


@dataclass
class BatchResult:
    x_hat: np.ndarray           # (n, B)
    objectives: np.ndarray      # (B,)
    residuals: np.ndarray       # (B,)
    iterations: np.ndarray      # (B,)
    statuses: list
    wall_time: float

    def single(self, j: int = 0) -> RecoveryResult:
        return RecoveryResult(
            x_hat=self.x_hat[:, j].copy(),
            l1_objective=float(self.objectives[j]),
            residual_norm=float(self.residuals[j]),
            iterations=int(self.iterations[j]),
            status=self.statuses[j],
            wall_time=self.wall_time,
        )


def _operator(A):
    if isinstance(A, BinaryMatrix):
        return A.csc.tocsr()
    if isinstance(A, DenseMatrix):
        return A.entries
    return np.asarray(A, dtype=np.float64)


class _ColumnState:
    """Bookkeeping for per-column freeze-on-convergence in a batch."""

    def __init__(self, shapes, batch):
        self.remaining = np.arange(batch)
        self.out = [np.zeros((dim, batch)) for dim in shapes]
        self.converged = np.zeros(batch, dtype=bool)
        self.iterations = np.zeros(batch, dtype=np.int64)

    def freeze(self, done_mask, it, blocks):
        """Store finished columns and report the compact keep-mask."""
        done_idx = self.remaining[done_mask]
        for ary, block in zip(self.out, blocks):
            ary[:, done_idx] = block[:, done_mask]
        self.converged[done_idx] = True
        self.iterations[done_idx] = it
        keep = ~done_mask
        self.remaining = self.remaining[keep]
        return keep

    def finish(self, it, blocks):
        if self.remaining.size:
            for ary, block in zip(self.out, blocks):
                ary[:, self.remaining] = block
            self.iterations[self.remaining] = it


class BasisPursuit:
    """Reusable decoder for one measurement matrix.

    Precomputes the Gram factorization once; ``solve_batch`` then handles
    any number of right-hand sides.  Instances are read-only after
    construction and safe to share.
    """

    def __init__(self, A, config: SolverConfig | None = None):
        self.config = config or SolverConfig()
        self.matrix = A
        self.op = _operator(A)
        self.m, self.n = A.shape
        gram = self.op @ self.op.T
        gram = gram.toarray() if scipy.sparse.issparse(gram) else np.asarray(gram)
        self.ridge = 0.0
        factor = None
        try:
            factor = scipy.linalg.cho_factor(gram)
            # A semidefinite Gram can slip through with tiny pivots; those
            # amplify rounding noise in the solves, so fall back to the ridge.
            pivots = np.diag(factor[0]) ** 2
            if pivots.min() < 1e-12 * pivots.max():
                factor = None
        except scipy.linalg.LinAlgError:
            factor = None
        if factor is None:
            self.ridge = 1e-10 * float(np.trace(gram)) / self.m
            factor = scipy.linalg.cho_factor(gram + self.ridge * np.eye(self.m))
        self._factor = factor
        self._gram = gram
        self._factor_ball = None  # cho_factor(gram + I), built on first eps > 0 solve

    def _ball_factor(self):
        if self._factor_ball is None:
            self._factor_ball = scipy.linalg.cho_factor(self._gram + np.eye(self.m))
        return self._factor_ball

    def min_residual_norms(self, Y: np.ndarray) -> np.ndarray:
        """Per-column distance from Y to the range of A (up to ridge error)."""
        W = scipy.linalg.cho_solve(self._factor, Y)
        return np.linalg.norm(Y - self._gram @ W, axis=0)

    def solve_batch(self, Y: np.ndarray, epsilon: float = 0.0) -> BatchResult:
        cfg = self.config
        Y = np.asarray(Y, dtype=np.float64)
        if Y.ndim == 1:
            Y = Y[:, None]
        if Y.shape[0] != self.m:
            raise ValueError(f"Y has {Y.shape[0]} rows, matrix has {self.m}")
        if not np.isfinite(epsilon) or epsilon < 0:
            raise ValueError(f"epsilon must be finite and >= 0, got {epsilon}")
        start = time.perf_counter()
        B = Y.shape[1]
        y_norms = np.linalg.norm(Y, axis=0)
        feas_slack = cfg.feasibility_tol * np.maximum(1.0, y_norms)
        infeasible = self.min_residual_norms(Y) > epsilon + feas_slack

        if epsilon == 0.0:
            X, converged, iterations = self._iterate_eq(Y)
        else:
            X, converged, iterations = self._iterate_ball(Y, epsilon)

        residuals = np.linalg.norm(Y - self.op @ X, axis=0)
        feas_ok = residuals <= epsilon + feas_slack
        statuses = []
        for j in range(B):
            if infeasible[j]:
                statuses.append(Status.INFEASIBLE)
            elif converged[j] and feas_ok[j]:
                statuses.append(Status.CONVERGED)
            else:
                statuses.append(Status.MAX_ITERATIONS)
        return BatchResult(
            x_hat=X,
            objectives=np.sum(np.abs(X), axis=0),
            residuals=residuals,
            iterations=iterations,
            statuses=statuses,
            wall_time=time.perf_counter() - start,
        )

    def _adapt(self, rho, prim, dual, duals):
        cfg = self.config
        up = prim > cfg.adapt_ratio * dual
        down = dual > cfg.adapt_ratio * prim
        if not (up.any() or down.any()):
            return rho
        factor = np.ones_like(rho)
        factor[up] = cfg.adapt_factor
        factor[down] = 1.0 / cfg.adapt_factor
        new_rho = np.clip(rho * factor, cfg.rho_min, cfg.rho_max)
        scale = new_rho / rho
        for U in duals:
            U /= scale[None, :]
        return new_rho

    def _iterate_eq(self, Y):
        """Equality-constrained path: blocks x (projection onto Ax = y)
        and z (shrinkage)."""
        cfg = self.config
        n = self.n
        B = Y.shape[1]
        state = _ColumnState([n], B)
        Z = np.zeros((n, B))
        U = np.zeros((n, B))
        rho = np.full(B, cfg.rho_init)
        floor = 1e-12
        X = Z
        for it in range(1, cfg.max_iterations + 1):
            V = Z - U
            W = scipy.linalg.cho_solve(self._factor, self.op @ V - Y)
            X = V - self.op.T @ W
            V = X + U
            thr = 1.0 / rho
            Z_new = np.sign(V) * np.maximum(np.abs(V) - thr[None, :], 0.0)
            U += X - Z_new
            prim = np.linalg.norm(X - Z_new, axis=0)
            dual = rho * np.linalg.norm(Z_new - Z, axis=0)
            Z = Z_new
            eps_pri = cfg.primal_tol * np.maximum(
                np.linalg.norm(X, axis=0), np.linalg.norm(Z, axis=0)) + floor
            eps_dual = cfg.dual_tol * rho * np.linalg.norm(U, axis=0) + floor
            done = (prim <= eps_pri) & (dual <= eps_dual)
            if done.any():
                keep = state.freeze(done, it, [X])
                if not state.remaining.size:
                    return state.out[0], state.converged, state.iterations
                Z, U, Y, rho = Z[:, keep], U[:, keep], Y[:, keep], rho[keep]
                prim, dual = prim[keep], dual[keep]
            if it % cfg.adapt_period == 0:
                rho = self._adapt(rho, prim, dual, [U])
        state.finish(cfg.max_iterations, [X])
        return state.out[0], state.converged, state.iterations

    def _iterate_ball(self, Y, epsilon):
        """Noisy path: feasible block (x, r) with Ax + r = y, prox block
        (z, s) with shrinkage on z and the eps-ball projection on s."""
        cfg = self.config
        n, m = self.n, self.m
        B = Y.shape[1]
        factor = self._ball_factor()
        state = _ColumnState([n], B)
        Z = np.zeros((n, B))
        S = np.zeros((m, B))
        Ux = np.zeros((n, B))
        Ur = np.zeros((m, B))
        rho = np.full(B, cfg.rho_init)
        floor = 1e-12
        X = Z
        for it in range(1, cfg.max_iterations + 1):
            a = Z - Ux
            b = S - Ur
            nu = scipy.linalg.cho_solve(factor, self.op @ a + b - Y)
            X = a - self.op.T @ nu
            R = b - nu
            V = X + Ux
            thr = 1.0 / rho
            Z_new = np.sign(V) * np.maximum(np.abs(V) - thr[None, :], 0.0)
            T = R + Ur
            t_norm = np.linalg.norm(T, axis=0)
            scale = np.where(t_norm > epsilon, epsilon / np.maximum(t_norm, 1e-300), 1.0)
            S_new = T * scale[None, :]
            Ux += X - Z_new
            Ur += R - S_new
            prim = np.sqrt(np.linalg.norm(X - Z_new, axis=0) ** 2
                           + np.linalg.norm(R - S_new, axis=0) ** 2)
            dual = rho * np.sqrt(np.linalg.norm(Z_new - Z, axis=0) ** 2
                                 + np.linalg.norm(S_new - S, axis=0) ** 2)
            Z, S = Z_new, S_new
            w_norm = np.sqrt(np.linalg.norm(X, axis=0) ** 2 + np.linalg.norm(R, axis=0) ** 2)
            v_norm = np.sqrt(np.linalg.norm(Z, axis=0) ** 2 + np.linalg.norm(S, axis=0) ** 2)
            u_norm = np.sqrt(np.linalg.norm(Ux, axis=0) ** 2 + np.linalg.norm(Ur, axis=0) ** 2)
            eps_pri = cfg.primal_tol * np.maximum(w_norm, v_norm) + floor
            eps_dual = cfg.dual_tol * rho * u_norm + floor
            done = (prim <= eps_pri) & (dual <= eps_dual)
            if done.any():
                keep = state.freeze(done, it, [X])
                if not state.remaining.size:
                    return state.out[0], state.converged, state.iterations
                Z, S = Z[:, keep], S[:, keep]
                Ux, Ur = Ux[:, keep], Ur[:, keep]
                Y, rho = Y[:, keep], rho[keep]
                prim, dual = prim[keep], dual[keep]
            if it % cfg.adapt_period == 0:
                rho = self._adapt(rho, prim, dual, [Ux, Ur])
        state.finish(cfg.max_iterations, [X])
        return state.out[0], state.converged, state.iterations


def basis_pursuit(instance: RecoveryInstance, config: SolverConfig | None = None) -> RecoveryResult:
    """Solve one recovery instance; see BasisPursuit for the algorithm."""
    solver = BasisPursuit(instance.A, config)
    return solver.solve_batch(instance.y, instance.epsilon).single(0)


def evaluate_recovery(x_hat, true_x, threshold: float):
    """Relative l2 error against the ground truth and the success flag."""
    x_hat = np.asarray(x_hat, dtype=np.float64).ravel()
    true_x = np.asarray(true_x, dtype=np.float64).ravel()
    if x_hat.shape != true_x.shape:
        raise ValueError("length mismatch")
    truth_norm = np.linalg.norm(true_x)
    if truth_norm == 0.0:
        raise ZeroTruth("relative error undefined for zero truth")
    rel = float(np.linalg.norm(x_hat - true_x) / truth_norm)
    return rel, rel <= threshold


def sparse_matvec(M: BinaryMatrix, v) -> np.ndarray:
    """A @ v by index-bucket summation: additions only, no multiplies."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape[0] != M.cols:
        raise ValueError(f"vector length {v.shape[0]} != cols {M.cols}")
    csc = M.csc
    col_ids = np.repeat(np.arange(M.cols), np.diff(csc.indptr))
    return np.bincount(csc.indices, weights=v[col_ids], minlength=M.rows)


def sparse_rmatvec(M: BinaryMatrix, v) -> np.ndarray:
    """A^T @ v by index-bucket summation."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape[0] != M.rows:
        raise ValueError(f"vector length {v.shape[0]} != rows {M.rows}")
    csc = M.csc
    col_ids = np.repeat(np.arange(M.cols), np.diff(csc.indptr))
    return np.bincount(col_ids, weights=v[csc.indices], minlength=M.cols)
