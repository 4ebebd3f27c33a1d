"""Exception types shared across the package.

Everything raised on bad input or a failed computation derives from
BincsError so the CLI can map any package failure to a runtime exit code.
"""


class BincsError(Exception):
    """Base class for all package errors."""


class NotPrime(BincsError):
    def __init__(self, q):
        super().__init__(f"q must be a prime number, got {q}")
        self.q = q


class DegreeOutOfRange(BincsError):
    """Left degree l outside [1, q-1]."""


class InvalidDegree(BincsError):
    """Polynomial degree r < 1."""


class MatrixFormatError(BincsError):
    """Malformed Matrix Market file; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConvergenceFailure(BincsError):
    """Eigen/factorization routine failed to converge."""


class TrivialNullSpace(BincsError):
    """Matrix has full column rank; nothing to sample."""


class NotApplicable(BincsError):
    """Coherence-based RIP bound premise (k-1)*mu < 1 violated."""


class OrderTooLarge(BincsError):
    """Sparsity order k outside the certifiable range."""


class DegenerateTheta(BincsError):
    """floor(n/k) < 2; the entropy lower bound is undefined."""


class Infeasible(BincsError):
    """No point satisfies the recovery constraints."""


class CyclingGuardExceeded(BincsError):
    """Simplex pivot count exceeded the anti-stall guard."""


class ZeroTruth(BincsError):
    """Relative error is undefined for a zero ground-truth vector."""


class CrossingNotBracketed(BincsError):
    """Success-rate grid never crosses the requested quantile."""

    def __init__(self, m, level):
        super().__init__(f"m={m}: success rate never crosses {level}")
        self.m = m
        self.level = level


class MissingInputs(BincsError):
    """Report generation found no usable result files."""


class ConfigError(BincsError):
    """Bad key, value, or combination in a phase-sweep config."""
