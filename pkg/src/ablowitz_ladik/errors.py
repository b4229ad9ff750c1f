"""Exception hierarchy shared by every module."""


class ALError(Exception):
    """Base class for all library errors."""


class SingularFieldError(ALError):
    """A site has 1 - q r (numerically) zero, or the spectral parameter is zero."""


class PoleError(ALError):
    """The spectral parameter sits on a pole of the r-matrix or of a product formula."""


class SingularMatrixError(ALError):
    """A 2x2 determinant fell below the inversion floor."""


class LaurentExtractionError(ALError):
    """Circle-sampled Laurent reconstruction exceeded its residual tolerance."""


class BoundarySingularityError(ALError):
    """The boundary denominator a + d q0 - c r0 (or a gauge/closure analogue) vanished."""


class BranchMismatchError(ALError):
    """The selected square-root branch does not invert the change of variables."""


class ConstraintViolationError(ALError):
    """Parameters or fields violate a reduction or recursion constraint."""


class BlowUpError(ALError):
    """Time integration left the admissible region.

    ``last_time`` and ``trajectory`` carry the partial result.
    """

    def __init__(self, message, last_time=None, trajectory=None):
        super().__init__(message)
        self.last_time = last_time
        self.trajectory = trajectory


class IllConditionedError(ALError):
    """A linear solve was refused because the condition number is too large."""


class ConfigError(ALError):
    """Invalid run configuration (CLI)."""
