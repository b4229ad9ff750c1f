"""Ablowitz-Ladik lattice with integrable and time-dependent boundaries."""

from .errors import (
    ALError,
    BlowUpError,
    BoundarySingularityError,
    BranchMismatchError,
    ConfigError,
    ConstraintViolationError,
    IllConditionedError,
    LaurentExtractionError,
    PoleError,
    SingularFieldError,
    SingularMatrixError,
)
from .model import BoundaryParams, LatticeState, ModelParams, random_state

__version__ = "0.1.0"
