"""Exception hierarchy.

Errors fall into two families so the CLI can map them onto exit codes:
``DataError`` (bad shapes, bad files, bad requests) and ``NumericalError``
(factorizations that fail or results that cannot be realized).
"""


class TensorDMDError(Exception):
    pass


class DataError(TensorDMDError):
    pass


class NumericalError(TensorDMDError):
    pass


class ShapeMismatch(DataError, ValueError):
    pass


class EmptyList(DataError, ValueError):
    pass


class IndexOutOfRange(DataError, IndexError):
    pass


class NotBlockCirculant(DataError, ValueError):
    pass


class NotFDiagonal(DataError, ValueError):
    pass


class RankRequestTooLarge(DataError, ValueError):
    pass


class InvalidTruncation(DataError, ValueError):
    pass


class TooFewSnapshots(DataError, ValueError):
    pass


class SquareOutOfBounds(DataError, ValueError):
    pass


class BadMagic(DataError):
    pass


class TruncatedFile(DataError):
    pass


class ExtentOverflow(DataError):
    pass


class UnsupportedPgm(DataError):
    pass


class InconsistentFrameSize(DataError):
    pass


class IoFailure(DataError, OSError):
    pass


class NoConvergence(NumericalError):
    pass


class NotRealizable(NumericalError):
    """Inverse transform left an imaginary residual above tolerance."""

    def __init__(self, residual, bound):
        super().__init__(
            f"imaginary residual {residual:.3e} exceeds bound {bound:.3e}")
        self.residual = residual
        self.bound = bound


class SingularSlice(NumericalError):
    """A Fourier slice is (numerically) singular; ``slice_index`` is 1-based."""

    def __init__(self, slice_index, condition_estimate):
        super().__init__(
            f"Fourier slice {slice_index} is singular "
            f"(condition estimate {condition_estimate:.3e})")
        self.slice_index = slice_index
        self.condition_estimate = condition_estimate


class IdentityViolation(NumericalError):
    pass


class DefectiveMatrixWarning(RuntimeWarning):
    """Eigenvector matrix condition estimate exceeded the defectiveness bound."""
