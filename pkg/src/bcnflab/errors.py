"""Exception types shared across the package."""
from __future__ import annotations

__all__ = [
    "BcnfError",
    "DegenerateParameterError",
    "ComplexEigenvaluesError",
    "OutsidePhiError",
    "ItineraryMismatchError",
    "SingularCompositionError",
    "PointUndefinedError",
    "VertexBudgetError",
    "EscapeError",
]


class BcnfError(Exception):
    """Base class for every error raised by this package."""


class DegenerateParameterError(BcnfError):
    """A closed-form denominator vanished (e.g. a fixed point is undefined)."""


class ComplexEigenvaluesError(BcnfError):
    """The half-map Jacobian has a non-positive discriminant."""


class OutsidePhiError(BcnfError):
    """An operation that needs the saddle parameter region was called outside it."""


class ItineraryMismatchError(BcnfError):
    """A solved periodic point does not sit in the half-plane its letter demands."""


class SingularCompositionError(BcnfError):
    """The word-composed linear part has eigenvalue one; no isolated cycle."""


class PointUndefinedError(BcnfError):
    """A constructed point does not exist at these parameters."""


class VertexBudgetError(BcnfError):
    """Manifold growth exceeded the configured vertex cap."""


class EscapeError(BcnfError):
    """An orbit or a growing manifold left the bounding radius."""
