"""Phase-space states and linear canonical transformations over an
indefinite metric.

The group of transformations preserving the canonical commutation relations
for a metric of signature (1,4) acts on mean vectors and covariance
matrices; the quadratic form of the means against the inverse covariance is
invariant under that action and, on saturated states, encodes the two
length scales of the theory. This package provides the group machinery, the
states, the invariant, the asymptotic-limit sweeps, and a CLI over all of
it.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConicNoRealRoot,
    DimensionMismatch,
    IndexOutOfRange,
    InsufficientPoints,
    InvalidScales,
    NonFinite,
    NonPositiveValue,
    NonPositiveVariance,
    NormTooLarge,
    NotDeSitter,
    NotInAlgebra,
    NotSymplectic,
    QpsError,
    QuadratureNotConverged,
    SingularMatrix,
    ZeroScale,
)
from .numerics import RngStream, expm, loglog_fit, solve  # noqa: F401
from .sympgroup import (  # noqa: F401
    DeSitterMatrix,
    LctMatrix,
    Metric,
    Signature,
    boost,
    build_metric,
    build_symplectic_form,
    compose_lct,
    embed_de_sitter,
    exp_to_group,
    fourier_lct,
    is_symplectic,
    lct_from_json,
    lct_inverse,
    lct_to_json,
    random_de_sitter,
    random_lct,
    random_sp_generator,
)
from .qpstate import (  # noqa: F401
    SIG_1_4,
    CovarianceMatrix,
    GaussianParams,
    PhaseMean,
    QpsState,
    QuadratureConfig,
    ScaleConfig,
    canonical_cov_inverse_closed_form,
    canonical_state,
    cov_determinant,
    gamma_invariant,
    gaussian_from_cov,
    gaussian_moments_quadrature,
    saturation_residual,
    state_from_json,
    state_to_json,
    transform_state,
)
from .geometry import (  # noqa: F401
    ConicCoefficients,
    ConicPoint,
    SweepReport,
    born_duality_check,
    conic_coefficients,
    conic_point,
    eta_contraction,
    general_frame_gamma,
    limit_sweep_L,
    limit_sweep_ell,
    residual_p,
    residual_x,
    scaled_equation_lhs,
    sweep_to_csv,
    sweep_to_json,
)
from .verify import VerificationReport, run_verify  # noqa: F401
