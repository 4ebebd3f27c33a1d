"""Measurement-matrix constructions.

Three deterministic binary families built from arithmetic over a prime
field, plus seeded Gaussian baselines:

* array-code matrix ``H(q, l)``: lq x q^2 blocks of shift-permutation
  powers; column weight l, row weight q, any two columns overlap in at
  most one row.
* DeVore polynomial matrix: q^2 x q^(r+1); column j encodes the graph of
  the degree-<=r polynomial with base-q coefficient digits of j; column
  weight q, overlaps at most r.
* Euler-square matrix: the row-index Latin square plus l-1 mutually
  orthogonal squares (i, j) -> (i + s*j) mod q; a column permutation of
  ``H(q, l)``.

Binary matrices are kept as per-column sorted row-index lists, which is
both the natural output of the constructions and the form the analysis
and solver code consume.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse

from .errors import DegreeOutOfRange, InvalidDegree, NotPrime
from .rng import normal_block


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x < 4:
        return True
    if x % 2 == 0:
        return False
    d = 3
    while d * d <= x:
        if x % d == 0:
            return False
        d += 2
    return True


def next_prime_geq(x: int) -> int:
    """Smallest prime >= x, by trial division."""
    if x < 2:
        raise ValueError(f"need x >= 2, got {x}")
    p = x
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class BinaryMatrix:
    """Sparse 0/1 matrix stored as per-column sorted row indices.

    Equivalently the bi-adjacency matrix of a bipartite graph whose left
    nodes are columns and right nodes are rows.
    """

    rows: int
    cols: int
    col_support: tuple

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix must be nonempty")
        if len(self.col_support) != self.cols:
            raise ValueError("col_support length must equal cols")
        support = tuple(tuple(int(r) for r in col) for col in self.col_support)
        for j, col in enumerate(support):
            for a, b in zip(col, col[1:]):
                if a >= b:
                    raise ValueError(f"column {j}: row indices not strictly increasing")
            if col and (col[0] < 0 or col[-1] >= self.rows):
                raise ValueError(f"column {j}: row index out of range")
        object.__setattr__(self, "col_support", support)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return sum(len(col) for col in self.col_support)

    def column_weights(self) -> np.ndarray:
        return np.array([len(col) for col in self.col_support])

    def row_weights(self) -> np.ndarray:
        w = np.zeros(self.rows, dtype=np.int64)
        for col in self.col_support:
            for r in col:
                w[r] += 1
        return w

    @cached_property
    def csc(self) -> scipy.sparse.csc_matrix:
        indptr = np.zeros(self.cols + 1, dtype=np.int64)
        for j, col in enumerate(self.col_support):
            indptr[j + 1] = indptr[j] + len(col)
        indices = np.fromiter(
            (r for col in self.col_support for r in col), dtype=np.int64, count=indptr[-1]
        )
        data = np.ones(indptr[-1])
        return scipy.sparse.csc_matrix(
            (data, indices, indptr), shape=(self.rows, self.cols)
        )

    def toarray(self) -> np.ndarray:
        return self.csc.toarray()

    def take_columns(self, n: int) -> "BinaryMatrix":
        """First n columns (used to trim a construction to a signal length)."""
        if not 1 <= n <= self.cols:
            raise ValueError(f"need 1 <= n <= {self.cols}, got {n}")
        return BinaryMatrix(self.rows, n, self.col_support[:n])

    def __eq__(self, other):
        return (
            isinstance(other, BinaryMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.col_support == other.col_support
        )


@dataclass(frozen=True)
class DenseMatrix:
    """Row-major real matrix for Gaussian baselines."""

    rows: int
    cols: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix must be nonempty")
        arr = np.asarray(self.entries, dtype=np.float64).reshape(self.rows, self.cols)
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def toarray(self) -> np.ndarray:
        return self.entries

    def __eq__(self, other):
        return (
            isinstance(other, DenseMatrix)
            and self.shape == other.shape
            and np.array_equal(self.entries, other.entries)
        )


def construct_array_matrix(q: int, l: int) -> BinaryMatrix:
    """Array-code matrix H(q, l) of shape (l*q, q^2), q prime.

    Block (b, a) for b in [0, l), a in [0, q) is P^(b*a), with P the cyclic
    shift sending column c to row (c+1) mod q.  Column (a, c) therefore has
    its block-b one at row b*q + ((c + a*b) mod q).
    """
    if not is_prime(q):
        raise NotPrime(q)
    if not 1 <= l <= q - 1:
        raise DegreeOutOfRange(f"need 1 <= l <= q-1 = {q - 1}, got l={l}")
    support = []
    for a in range(q):
        for c in range(q):
            support.append(tuple(b * q + (c + a * b) % q for b in range(l)))
    return BinaryMatrix(l * q, q * q, tuple(support))


def construct_devore_matrix(q: int, r: int) -> BinaryMatrix:
    """DeVore polynomial matrix of shape (q^2, q^(r+1)), q prime.

    Column j encodes the polynomial p(x) = sum_i c_i x^i where
    j = sum_i c_i q^i (base-q digits, c_0 least significant); it has ones
    at flattened rows x*q + p(x) for x in [0, q).
    """
    if not is_prime(q):
        raise NotPrime(q)
    if r < 1:
        raise InvalidDegree(f"need r >= 1, got r={r}")
    n = q ** (r + 1)
    xs = list(range(q))
    support = []
    coeffs = [0] * (r + 1)
    for j in range(n):
        rem = j
        for i in range(r + 1):
            coeffs[i] = rem % q
            rem //= q
        col = []
        for x in xs:
            acc = 0
            for c in reversed(coeffs):
                acc = (acc * x + c) % q
            col.append(x * q + acc)
        support.append(tuple(col))
    return BinaryMatrix(q * q, n, tuple(support))


def construct_euler_matrix(q: int, l: int) -> BinaryMatrix:
    """Euler-square matrix of shape (l*q, q^2), q prime.

    Block 0 places cell (i, j) in row i (the row-index square); block s in
    [1, l) uses the Latin square (i, j) -> (i + s*j) mod q.  The squares are
    mutually orthogonal for prime q, and the result equals H(q, l) with its
    columns permuted by the cell transposition (i, j) -> (j, i).
    """
    if not is_prime(q):
        raise NotPrime(q)
    if not 1 <= l <= q - 1:
        raise DegreeOutOfRange(f"need 1 <= l <= q-1 = {q - 1}, got l={l}")
    support = []
    for i in range(q):
        for j in range(q):
            col = [i]
            for s in range(1, l):
                col.append(s * q + (i + s * j) % q)
            support.append(tuple(col))
    return BinaryMatrix(l * q, q * q, tuple(support))


def construct_gaussian_matrix(m: int, n: int, seed: int) -> DenseMatrix:
    """i.i.d. N(0, 1)/sqrt(m) entries from the seeded Box-Muller stream.

    Entries fill row-major; identical (m, n, seed) gives bit-identical
    matrices.
    """
    if m < 1 or n < 1:
        raise ValueError("need m, n >= 1")
    entries = normal_block(int(seed), m * n) / np.sqrt(m)
    return DenseMatrix(m, n, entries.reshape(m, n))
