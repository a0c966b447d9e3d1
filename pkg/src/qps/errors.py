"""Exception types shared across the package.

Every error raised by the numeric kernel or the phase-space layers derives
from :class:`QpsError`, so callers (and the CLI) can distinguish domain
failures from programming errors with a single except clause.
"""

from __future__ import annotations


class QpsError(Exception):
    """Base class for all domain errors raised by this package."""


class SingularMatrix(QpsError):
    """A pivot fell below the singularity floor during factorization.

    Attributes:
        pivot_index: zero-based elimination step at which the pivot failed.
        pivot: magnitude of the offending pivot.
    """

    def __init__(self, pivot_index: int, pivot: float):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(
            f"singular matrix: pivot {pivot:.3e} at elimination step {pivot_index}"
        )


class NonFinite(QpsError):
    """An operation produced (or was handed) NaN/Inf entries."""


class InsufficientPoints(QpsError):
    """Fewer data points than the fit requires."""


class NonPositiveValue(QpsError):
    """A log-log fit received a coordinate that is not strictly positive."""


class DimensionMismatch(QpsError):
    """Operand shapes are inconsistent with each other or the signature."""


class NotInAlgebra(QpsError):
    """Matrix does not satisfy the symplectic algebra condition S^T J + J S = 0."""


class NormTooLarge(QpsError):
    """Generator norm exceeds the exponential's accuracy envelope."""


class NotSymplectic(QpsError):
    """Matrix fails the symplectic membership test M^T J M = J.

    Attributes:
        deviation: measured relative Frobenius deviation.
    """

    def __init__(self, deviation: float, tol: float):
        self.deviation = deviation
        self.tol = tol
        super().__init__(
            f"not symplectic: membership deviation {deviation:.3e} exceeds tol {tol:.3e}"
        )


class NotDeSitter(QpsError):
    """Matrix fails the metric-orthogonality test A^T eta A = eta."""


class ZeroScale(QpsError):
    """A scale parameter that must be nonzero was zero."""


class InvalidScales(QpsError):
    """Scale configuration violates hbar > 0, ell > 0, L >= ell, or dynamic range."""


class IndexOutOfRange(QpsError):
    """Axis index outside 0..n-1."""


class NonPositiveVariance(QpsError):
    """A coordinate variance that must be positive was not."""


class QuadratureNotConverged(QpsError):
    """Successive quadrature refinements disagree beyond tolerance."""


class ConicNoRealRoot(QpsError):
    """The conic section has no real solution for the requested coordinate."""
