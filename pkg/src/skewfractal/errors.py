"""Exception hierarchy shared by all modules."""


class SkewFractalError(Exception):
    """Base class for all library errors."""


class MatrixValidationError(SkewFractalError, ValueError):
    """A candidate base matrix violates one of the standing hypotheses."""


class DetNotUnimodular(MatrixValidationError):
    """|det A| != 1 (exact integer check)."""


class EigenvalueOnUnitCircle(MatrixValidationError):
    """Some eigenvalue modulus lies within 1e-9 of 1 (not hyperbolic)."""


class RepeatedOrComplexEigenvalue(MatrixValidationError):
    """Eigenvalues are not real with pairwise distinct moduli."""


class RootPolishDiverged(SkewFractalError):
    """Newton polish failed to reach the required residual."""


class InvalidParameter(SkewFractalError, ValueError):
    """A scalar parameter violates its contract (lambda range, sample counts, ...)."""


class TruncationTooDeep(SkewFractalError):
    """The series truncation needs more than 1e6 terms for the requested tolerance."""


class ArgumentOutOfRegime(SkewFractalError):
    """An operation defined only in the fractal regime |B_i| < lambda was called outside it."""


class ResourceLimit(SkewFractalError):
    """A counting grid or render request exceeds the desk-scale guard."""


class ConfigError(SkewFractalError, ValueError):
    """The analysis config file is malformed or fails schema validation."""
