"""Exception hierarchy shared across the toolkit.

The CLI maps these onto its exit codes: domain/config problems -> 2,
quadrature failures -> 3, no-solution -> 4, certificate failures -> 5.
"""


class RStokesError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RStokesError, ValueError):
    """An argument lies outside the admissible parameter domain."""


class NotSPDError(DomainError):
    """Matrix operator is not symmetric positive definite."""


class NonFiniteWeightError(DomainError):
    """An observation weight evaluated to a non-finite value."""


class DegenerateDataError(DomainError):
    """Initial data has zero norm; the observation carries no information."""


class OutOfDomainError(DomainError):
    """A spatial evaluation point lies outside the operator domain."""


class QuadratureError(RStokesError, RuntimeError):
    """Adaptive quadrature exhausted its panel budget before converging."""


class ThresholdNotFoundError(RStokesError, RuntimeError):
    """The threshold-time scan found no qualifying grid point; enlarge the range."""


class CertificateError(RStokesError, RuntimeError):
    """Base class for failures of the observation-time certification."""


class MonotonicityError(CertificateError):
    """Sampled observation values are not strictly decreasing in the order
    parameter; the observation time is below the certified threshold."""


class UncertifiedTimeError(CertificateError):
    """Observation time is below the scanned threshold estimate and no
    override was requested."""


class NoSolutionError(RStokesError, RuntimeError):
    """The observed value lies outside the attainable range, so no order
    parameter reproduces it."""
