"""Exception types shared across the package."""


class CompDiffError(Exception):
    """Base class for all library errors."""


class PoleError(CompDiffError):
    """A linear-fractional denominator vanished at the evaluation point."""


class GeometryDomainError(CompDiffError):
    """Input violates a geometric domain constraint (ball/Siegel membership)."""


class NotSelfMapError(CompDiffError):
    """A map that was required to send the ball into itself does not."""


class ClassificationError(CompDiffError):
    """A map does not have the fixed-point structure an operation requires."""


class SliceReductionError(CompDiffError):
    """A slice restriction was requested but the slice is not preserved."""


class SeriesDivergenceError(CompDiffError):
    """Taylor expansion requested for a map whose series does not converge
    on the closed ball."""


class WitnessHypothesisError(CompDiffError):
    """Witness construction preconditions are not met for the given pair."""


class InconclusiveError(CompDiffError):
    """The certificate search was exhausted without a usable witness.

    For validated distinct self-maps that are not both strict contractions
    this indicates a numerical failure, not a mathematical possibility.
    """
