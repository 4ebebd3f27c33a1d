"""Exact combinatorial and spectral analysis of a measurement matrix.

A binary matrix is analyzed as the bi-adjacency matrix of a bipartite
graph (columns = left nodes, rows = right nodes): girth, degree profile,
the largest column-support overlap ``lam``, the coherence ``mu`` of the
column-normalized matrix, rank and smallest nonzero singular value, and
Monte-Carlo verification of the null-space magnitude bounds that drive
the recovery certificates.
"""

import math
import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, TrivialNullSpace
from .matrices import BinaryMatrix
from .rng import Stream

INFINITE = math.inf


def girth(M: BinaryMatrix) -> float:
    """Length of the shortest cycle of the bipartite graph, or ``inf``.

    Breadth-first search from every vertex; the first collision between
    BFS branches bounds the shortest cycle through the source, and the
    minimum over sources is exact.  Searches are cut off at depths that
    can no longer beat the best cycle found, which keeps the scan fast
    once a short cycle is known.
    """
    n_left, n_right = M.cols, M.rows
    total = n_left + n_right
    adj = [[] for _ in range(total)]
    for j, col in enumerate(M.col_support):
        for r in col:
            adj[j].append(n_left + r)
            adj[n_left + r].append(j)
    best = INFINITE
    stamp = [-1] * total
    dist = [0] * total
    parent = [-1] * total
    for s in range(total):
        if len(adj[s]) < 2:
            continue
        stamp[s] = s
        dist[s] = 0
        parent[s] = -1
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if 2 * du >= best:
                break
            for w in adj[u]:
                if stamp[w] != s:
                    stamp[w] = s
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    c = du + dist[w] + 1
                    if c < best:
                        best = c
        if best == 4:
            break  # simple bipartite graphs have girth >= 4
    return best


@dataclass(frozen=True)
class DegreeProfile:
    left_degrees: tuple
    right_degrees: tuple
    left_regular: bool
    right_regular: bool

    @property
    def d_left(self) -> int:
        """Common left degree; only meaningful when left_regular."""
        return self.left_degrees[0]


def degree_profile(M: BinaryMatrix) -> DegreeProfile:
    """Exact column and row weight lists plus regularity flags."""
    left = tuple(int(w) for w in M.column_weights())
    right = tuple(int(w) for w in M.row_weights())
    return DegreeProfile(
        left_degrees=left,
        right_degrees=right,
        left_regular=len(set(left)) == 1 and left[0] > 0,
        right_regular=len(set(right)) == 1 and right[0] > 0,
    )


def _overlap_scan(M: BinaryMatrix):
    """Max raw and weight-normalized overlap over distinct column pairs.

    Counts shared rows through per-row column buckets, which touches each
    overlapping pair once per shared row instead of intersecting all
    O(n^2) support pairs.
    """
    row_cols = [[] for _ in range(M.rows)]
    for j, col in enumerate(M.col_support):
        for r in col:
            row_cols[r].append(j)
    weights = M.column_weights()
    lam = 0
    mu = 0.0
    for j, col in enumerate(M.col_support):
        counts = {}
        for r in col:
            for j2 in row_cols[r]:
                if j2 > j:
                    counts[j2] = counts.get(j2, 0) + 1
        if not counts:
            continue
        wj = weights[j]
        for j2, c in counts.items():
            if c > lam:
                lam = c
            normalized = c / math.sqrt(wj * weights[j2])
            if normalized > mu:
                mu = normalized
    return lam, mu


def max_column_inner_product(M: BinaryMatrix) -> int:
    """Largest support overlap between two distinct columns (the bound
    usually written as the matrix's lambda)."""
    if M.cols < 2:
        raise ValueError("need at least two columns")
    lam, _ = _overlap_scan(M)
    return lam


def coherence(M: BinaryMatrix) -> float:
    """Coherence of the column-normalized matrix; lam/d_L when left-regular."""
    if M.cols < 2:
        raise ValueError("need at least two columns")
    _, mu = _overlap_scan(M)
    return mu


def spectral(M, zero_tol: float = 1e-9):
    """(rank, smallest nonzero singular value) via the smaller Gram matrix.

    Eigenvalues below ``zero_tol`` times the spectral radius are treated
    as zero.
    """
    A = M.toarray()
    m, n = A.shape
    G = A @ A.T if m <= n else A.T @ A
    try:
        evals = np.linalg.eigvalsh(G)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver failed on {G.shape} Gram matrix: {exc}")
    top = float(evals[-1])
    if top <= 0.0:
        raise ValueError("zero matrix has no nonzero singular values")
    positive = evals[evals > zero_tol * top]
    return len(positive), float(np.sqrt(positive[0]))


@dataclass(frozen=True)
class MatrixAnalysis:
    rows: int
    cols: int
    girth: float
    dl_min: int
    dl_max: int
    dl_avg: float
    dr_min: int
    dr_max: int
    dr_avg: float
    left_regular: bool
    right_regular: bool
    lam: int
    mu: float
    rank: int
    sigma_min: float

    @property
    def d_left(self) -> int:
        return self.dl_min


def analyze_matrix(M: BinaryMatrix, zero_tol: float = 1e-9) -> MatrixAnalysis:
    """Full analysis record for a binary matrix."""
    prof = degree_profile(M)
    lam, mu = _overlap_scan(M)
    rank, sigma_min = spectral(M, zero_tol=zero_tol)
    return MatrixAnalysis(
        rows=M.rows,
        cols=M.cols,
        girth=girth(M),
        dl_min=min(prof.left_degrees),
        dl_max=max(prof.left_degrees),
        dl_avg=sum(prof.left_degrees) / M.cols,
        dr_min=min(prof.right_degrees),
        dr_max=max(prof.right_degrees),
        dr_avg=sum(prof.right_degrees) / M.rows,
        left_regular=prof.left_regular,
        right_regular=prof.right_regular,
        lam=lam,
        mu=mu,
        rank=rank,
        sigma_min=sigma_min,
    )


def liu_xia_constant(d_left: int, g) -> float:
    """Girth-based null-space constant: twice the geometric series in
    (d_L - 1) whose length depends on g mod 4."""
    if g == INFINITE:
        raise ValueError("girth constant undefined for acyclic graphs")
    g = int(g)
    if g < 4 or g % 2:
        raise ValueError(f"girth must be an even integer >= 4, got {g}")
    if d_left < 2:
        raise ValueError(f"need left degree >= 2, got {d_left}")
    if g % 4 == 2:
        t = (g - 2) // 4
        return 2.0 * sum((d_left - 1) ** i for i in range(t + 1))
    t = g // 4
    return 2.0 * sum((d_left - 1) ** i for i in range(t))


def null_space_basis(M: BinaryMatrix, zero_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the null space from the eigendecomposition of
    the n x n Gram matrix (eigenvectors at zero eigenvalues)."""
    A = M.toarray()
    G = A.T @ A
    try:
        evals, evecs = np.linalg.eigh(G)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver failed on {G.shape} Gram matrix: {exc}")
    top = float(evals[-1])
    if top <= 0.0:
        raise ValueError("zero matrix")
    null_mask = evals <= zero_tol * top
    if not np.any(null_mask):
        raise TrivialNullSpace(f"matrix has full column rank {M.cols}")
    return evecs[:, null_mask]


@dataclass(frozen=True)
class NullspaceReport:
    samples: int
    d_left: int
    lam: int
    girth: float
    max_ratio: float
    passed: bool
    girth_constant: float | None
    max_ratio_girth: float | None
    elapsed_s: float


def verify_nullspace_bound(
    M: BinaryMatrix, num_samples: int, seed: int, slack: float = 1e-10
) -> NullspaceReport:
    """Sample random unit null-space vectors and check the componentwise
    magnitude bounds.

    The primary check is max_i |v_i| * 2*d_L / (lam * ||v||_1) <= 1; when
    the girth is at least six the variant with the girth constant is
    evaluated as well.  Samples are seeded normal coefficients over an
    orthonormal null-space basis, so reports are reproducible.
    """
    if num_samples < 1:
        raise ValueError("need at least one sample")
    prof = degree_profile(M)
    if not prof.left_regular:
        raise ValueError("null-space bound requires a left-regular matrix")
    d_left = prof.d_left
    lam, _ = _overlap_scan(M)
    g = girth(M)
    basis = null_space_basis(M)
    stream = Stream(seed)
    start = time.perf_counter()
    max_ratio = 0.0
    max_ratio_girth = 0.0
    cprime = liu_xia_constant(d_left, g) if g >= 6 and g != INFINITE else None
    for _ in range(num_samples):
        coeff = stream.normals(basis.shape[1])
        v = basis @ coeff
        norm2 = np.linalg.norm(v)
        if norm2 < 1e-300:
            continue  # zero draw is excluded by construction
        v = v / norm2
        linf = float(np.max(np.abs(v)))
        l1 = float(np.sum(np.abs(v)))
        max_ratio = max(max_ratio, linf * 2.0 * d_left / (lam * l1))
        if cprime is not None:
            max_ratio_girth = max(max_ratio_girth, linf * cprime / l1)
    return NullspaceReport(
        samples=num_samples,
        d_left=d_left,
        lam=lam,
        girth=g,
        max_ratio=max_ratio,
        passed=max_ratio <= 1.0 + slack,
        girth_constant=cprime,
        max_ratio_girth=max_ratio_girth if cprime is not None else None,
        elapsed_s=time.perf_counter() - start,
    )
