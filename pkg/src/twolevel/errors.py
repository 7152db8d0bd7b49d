"""Exception types shared across the package."""


class TwoLevelError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(TwoLevelError):
    pass


class SingularM(TwoLevelError):
    """The smoother matrix M is singular (LU pivot below the floor)."""


class BadCoarseDim(TwoLevelError):
    """Requested coarse dimension outside [1, n]."""


class NotRealPencil(TwoLevelError):
    """Real-valued construction requested for a complex pencil."""


class ResidualImaginary(TwoLevelError):
    """Imaginary residue above the truncation threshold; conjugate pairing
    was broken upstream."""


class SingularBasisChange(TwoLevelError):
    pass


class CholeskyFailure(TwoLevelError):
    """Norm matrix numerically indefinite (excessive eigenbasis conditioning)."""


class SingularCoarseOperator(TwoLevelError):
    """R^* A P is singular; the coarse space is rank deficient."""


class ZeroDiagonal(TwoLevelError):
    pass


class SingularBlock(TwoLevelError):
    pass


class InconsistentBlockColoring(TwoLevelError):
    """A red-black split assigns different colors within one block."""


class ParseError(TwoLevelError):
    """Matrix Market parse failure; carries the offending line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class UnsupportedField(TwoLevelError):
    """Matrix Market field other than real/complex."""


class ConfigError(TwoLevelError):
    """Invalid run configuration (CLI exit code 2)."""


class IllConditionedEigenbasis(UserWarning):
    """Eigenvector matrix condition estimate above the warning threshold."""


class PairSplitWarning(UserWarning):
    """Coarse dimension bisected a conjugate pair; it was grown by one."""


class DivergenceOverflow(UserWarning):
    """An iteration residual exceeded the overflow guard."""
