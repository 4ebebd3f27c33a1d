"""Matrix Market exchange-format reader/writer.

Binary matrices are written as ``coordinate pattern general`` (1-based
"row col" pairs, in column order), dense matrices as ``array real
general`` (column-major entries, shortest round-trip float formatting).
The reader validates as it parses and reports the offending line number
on malformed input; a write/read round trip reproduces the matrix
exactly.
"""

import numpy as np

from .errors import MatrixFormatError
from .matrices import BinaryMatrix, DenseMatrix

_PATTERN_HEADER = "%%MatrixMarket matrix coordinate pattern general"
_ARRAY_HEADER = "%%MatrixMarket matrix array real general"


def export_matrix(matrix, path) -> None:
    """Write a BinaryMatrix or DenseMatrix to a Matrix Market file."""
    if isinstance(matrix, BinaryMatrix):
        lines = [_PATTERN_HEADER, f"{matrix.rows} {matrix.cols} {matrix.nnz}"]
        for j, col in enumerate(matrix.col_support):
            for r in col:
                lines.append(f"{r + 1} {j + 1}")
    elif isinstance(matrix, DenseMatrix):
        lines = [_ARRAY_HEADER, f"{matrix.rows} {matrix.cols}"]
        for j in range(matrix.cols):
            for i in range(matrix.rows):
                lines.append(repr(float(matrix.entries[i, j])))
    else:
        raise TypeError(f"cannot export {type(matrix).__name__}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def import_matrix(path):
    """Read a Matrix Market file back into a BinaryMatrix or DenseMatrix."""
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise MatrixFormatError("empty file", line=1)
    header = raw[0].strip()
    # Comment lines after the header are permitted by the format.
    body = [(i + 1, ln.strip()) for i, ln in enumerate(raw[1:], start=1)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if header == _PATTERN_HEADER:
        return _parse_pattern(body)
    if header == _ARRAY_HEADER:
        return _parse_array(body)
    raise MatrixFormatError(f"unsupported header {header!r}", line=1)


def _parse_size(body, expected_fields):
    if not body:
        raise MatrixFormatError("missing size line", line=2)
    lineno, text = body[0]
    parts = text.split()
    if len(parts) != expected_fields:
        raise MatrixFormatError(
            f"size line needs {expected_fields} integers, got {text!r}", line=lineno + 1
        )
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise MatrixFormatError(f"non-integer size field in {text!r}", line=lineno + 1)
    if any(v < 1 for v in values[:2]):
        raise MatrixFormatError("dimensions must be positive", line=lineno + 1)
    return lineno, values


def _parse_pattern(body) -> BinaryMatrix:
    _, (rows, cols, nnz) = _parse_size(body, 3)
    if nnz < 0:
        raise MatrixFormatError("negative entry count", line=body[0][0] + 1)
    entries = body[1:]
    if len(entries) != nnz:
        raise MatrixFormatError(
            f"expected {nnz} entry lines, found {len(entries)}",
            line=body[0][0] + 1,
        )
    support = [[] for _ in range(cols)]
    seen = set()
    for lineno, text in entries:
        parts = text.split()
        if len(parts) != 2:
            raise MatrixFormatError(f"expected 'row col', got {text!r}", line=lineno + 1)
        try:
            r, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixFormatError(f"non-integer index in {text!r}", line=lineno + 1)
        if not (1 <= r <= rows and 1 <= c <= cols):
            raise MatrixFormatError(f"index ({r}, {c}) out of range", line=lineno + 1)
        if (r, c) in seen:
            raise MatrixFormatError(f"duplicate entry ({r}, {c})", line=lineno + 1)
        seen.add((r, c))
        support[c - 1].append(r - 1)
    return BinaryMatrix(rows, cols, tuple(tuple(sorted(col)) for col in support))


def _parse_array(body) -> DenseMatrix:
    _, (rows, cols) = _parse_size(body, 2)
    entries = body[1:]
    if len(entries) != rows * cols:
        raise MatrixFormatError(
            f"expected {rows * cols} value lines, found {len(entries)}",
            line=body[0][0] + 1,
        )
    arr = np.empty((rows, cols))
    for pos, (lineno, text) in enumerate(entries):
        try:
            value = float(text)
        except ValueError:
            raise MatrixFormatError(f"bad real value {text!r}", line=lineno + 1)
        arr[pos % rows, pos // rows] = value
    return DenseMatrix(rows, cols, arr)


def write_vector(vec, path) -> None:
    """One value per line, shortest round-trip formatting."""
    with open(path, "w", encoding="ascii") as fh:
        for v in np.asarray(vec, dtype=np.float64).ravel():
            fh.write(repr(float(v)) + "\n")


def read_vector(path) -> np.ndarray:
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, text in enumerate(fh, start=1):
            text = text.strip()
            if not text or text.startswith("%") or text.startswith("#"):
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise MatrixFormatError(f"bad vector value {text!r}", line=lineno)
    if not values:
        raise MatrixFormatError("no values found", line=1)
    return np.array(values)
