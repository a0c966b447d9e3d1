"""Geometric structure on the phase-space means.

The reference-frame invariant value Gamma = L^2/ell^2 turns the quadratic
form of the inverse canonical covariance into a conic in the (kappa, lambda)
plane,

    a kappa^2 + 2 b kappa lambda + c lambda^2 = L^2/ell^2,
    a = 4L^2/hbar^2,  b = -2 sqrt(L^2-ell^2)/(ell hbar),  c = 1/ell^2,

with discriminant a c - b^2 = 4/hbar^2 (an ellipse). Pushing the means
through metric-orthogonal frame changes rewrites the same equation with
signed eta-contractions plus a frame-projected cross term, and the two
asymptotic regimes decouple it:

    ell -> 0:      eta <x><x> = -L^2          (coordinate hyperboloid)
    L -> infinity: eta <p><p> = -(hbar/2ell)^2 (momentum hyperboloid)

The sweeps here quantify the approach to those limits; the leading relative
residuals are 4 kappa ell / hbar and 2 lambda / L.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import numerics, qpstate, sympgroup
from .errors import ConicNoRealRoot, DimensionMismatch, InvalidScales
from .qpstate import QpsState, ScaleConfig, canonical_state, gamma_invariant, transform_state
from .sympgroup import (
    DeSitterMatrix,
    Metric,
    Signature,
    build_metric,
    fourier_lct,
    random_de_sitter,
)

DEFAULT_DS_SCALE = 0.3


@dataclass(frozen=True)
class ConicCoefficients:
    """Quadratic form Q(kappa, lambda) = a kappa^2 + 2 b kappa lambda
    + c lambda^2 and its distinguished level gamma_star = L^2/ell^2."""

    a: float
    b: float
    c: float
    gamma_star: float

    def evaluate(self, kappa: float, lam: float) -> float:
        return self.a * kappa ** 2 + 2.0 * self.b * kappa * lam + self.c * lam ** 2

    def discriminant(self) -> float:
        return self.a * self.c - self.b ** 2


def conic_coefficients(scales: ScaleConfig) -> ConicCoefficients:
    a = 4.0 * scales.L ** 2 / scales.hbar ** 2
    b = -2.0 * math.sqrt(scales.L ** 2 - scales.ell ** 2) / (scales.ell * scales.hbar)
    c = 1.0 / scales.ell ** 2
    return ConicCoefficients(a=a, b=b, c=c, gamma_star=scales.gamma_star)


@dataclass(frozen=True)
class ConicPoint:
    kappa: float
    lam: float
    theta: float


def conic_point(scales: ScaleConfig, theta: float) -> ConicPoint:
    """Point on the conic via the completed-square parametrization
    kappa = (hbar/2 ell) cos t + (hbar sqrt(L^2-ell^2)/(2 ell^2)) sin t,
    lambda = (L^2/ell) sin t, which satisfies Q = gamma_star identically
    because a c - b^2 = 4/hbar^2."""
    kappa = (scales.p_max * math.cos(theta)
             + scales.hbar * math.sqrt(scales.L ** 2 - scales.ell ** 2)
             / (2.0 * scales.ell ** 2) * math.sin(theta))
    lam = scales.L ** 2 / scales.ell * math.sin(theta)
    return ConicPoint(kappa=kappa, lam=lam, theta=theta)


def conic_lambda_root(coeffs: ConicCoefficients, kappa: float, hbar: float) -> float:
    """Solve Q(kappa, lambda) = gamma_star for lambda, taking the branch
    continuous with +L at kappa = 0. Uses the identity a c - b^2 = 4/hbar^2
    to keep the discriminant cancellation-free."""
    disc = coeffs.c * coeffs.gamma_star - 4.0 * kappa ** 2 / hbar ** 2
    if disc < 0:
        raise ConicNoRealRoot(
            f"no real lambda at kappa={kappa}: discriminant {disc:.3e} < 0"
        )
    return (-coeffs.b * kappa + math.sqrt(disc)) / coeffs.c


def conic_kappa_root(coeffs: ConicCoefficients, lam: float, hbar: float) -> float:
    """Mirror solve for kappa; branch continuous with +hbar/(2 ell) at
    lambda = 0."""
    disc = coeffs.a * coeffs.gamma_star - 4.0 * lam ** 2 / hbar ** 2
    if disc < 0:
        raise ConicNoRealRoot(
            f"no real kappa at lambda={lam}: discriminant {disc:.3e} < 0"
        )
    return (-coeffs.b * lam + math.sqrt(disc)) / coeffs.a


def eta_contraction(v, metric: Metric) -> float:
    """Signed quadratic form sum_mu eta_mumu v_mu^2."""
    v = np.asarray(v, dtype=float)
    if v.shape != (metric.n,):
        raise DimensionMismatch(f"expected vector of length {metric.n}, got {v.shape}")
    return float(np.sum(metric.diag * v * v))


def residual_x(mean_x, scales: ScaleConfig, metric: Metric) -> float:
    """Relative residual of the coordinate hyperboloid equation
    eta <x><x> = -L^2."""
    return abs(eta_contraction(mean_x, metric) + scales.L ** 2) / scales.L ** 2


def residual_p(mean_p, scales: ScaleConfig, metric: Metric) -> float:
    """Relative residual of the momentum hyperboloid equation
    eta <p><p> = -(hbar/2 ell)^2."""
    target = scales.p_max ** 2
    return abs(eta_contraction(mean_p, metric) + target) / target


def scaled_equation_lhs(state: QpsState) -> float:
    """Gamma(state) / (L^2/ell^2); equals 1 for states on the conic and all
    their group transforms."""
    return gamma_invariant(state) / state.scales.gamma_star


def general_frame_gamma(kappa: float, lam: float, frame: DeSitterMatrix,
                        scales: ScaleConfig, metric: Metric) -> float:
    """Gamma evaluated from frame components alone:

        -a eta<p><p> + 2b (p . m_4)(x . m_4) - c eta<x><x>,

    where <p> = kappa row_4(A), <x> = lambda row_4(A), and m_4 is column 4
    of the exact inverse eta A^T eta. The cross projection recovers kappa
    and lambda, so this must match the direct Gamma of the transformed
    state; that two-path agreement is the central consistency check.
    """
    coeffs = conic_coefficients(scales)
    last = frame.n - 1
    row = frame.a[last, :]
    mean_p = kappa * row
    mean_x = lam * row
    back_col = frame.inverse()[:, last]
    kappa_rec = float(mean_p @ back_col)
    lam_rec = float(mean_x @ back_col)
    return (-coeffs.a * eta_contraction(mean_p, metric)
            + 2.0 * coeffs.b * kappa_rec * lam_rec
            - coeffs.c * eta_contraction(mean_x, metric))


@dataclass(frozen=True)
class SweepReport:
    """Residuals of a hyperboloid equation along a scale sweep.

    points holds (scale_value, residual) pairs in sweep order;
    fitted_order is the log-log slope of residual against the approach
    variable (ell for the coordinate sweep, 1/L for the momentum sweep),
    NaN when a residual is exactly zero; final_residual is the residual at
    the last (most asymptotic) point.
    """

    points: tuple
    fitted_order: float
    final_residual: float
    config: dict


def _fit_order(approach_values, residuals) -> float:
    if any(r <= 0 for r in residuals):
        return float("nan")
    fit = numerics.loglog_fit(list(zip(approach_values, residuals)))
    return fit.slope


def limit_sweep_ell(kappa: float, L: float, hbar: float, ell_values,
                    ds_seed: int, sig: Signature = qpstate.SIG_1_4,
                    ds_scale: float = DEFAULT_DS_SCALE) -> SweepReport:
    """Approach to the coordinate hyperboloid as ell shrinks.

    At each ell: put (kappa, lambda) on the conic (branch continuous with
    +L), push the coordinate mean through a seeded random metric-orthogonal
    frame, and record the relative residual of eta<x><x> = -L^2. The
    residual falls like 4 kappa ell / hbar to leading order.
    """
    ell_values = [float(e) for e in ell_values]
    if not ell_values:
        raise ValueError("ell_values must be non-empty")
    if any(e2 >= e1 for e1, e2 in zip(ell_values, ell_values[1:])):
        raise ValueError("ell_values must be strictly decreasing")
    if any(e >= L for e in ell_values):
        raise InvalidScales("every swept ell must be < L")
    metric = build_metric(sig)
    points = []
    for i, ell in enumerate(ell_values):
        scales = ScaleConfig(hbar=hbar, ell=ell, L=L)
        lam = conic_lambda_root(conic_coefficients(scales), kappa, hbar)
        frame = random_de_sitter(sig, numerics.RngStream(ds_seed, i), ds_scale)
        mean_x = lam * frame.a[sig.n - 1, :]
        points.append((ell, residual_x(mean_x, scales, metric)))
    residuals = [r for _, r in points]
    return SweepReport(
        points=tuple(points),
        fitted_order=_fit_order(ell_values, residuals),
        final_residual=residuals[-1],
        config={"sweep": "ell", "kappa": kappa, "L": L, "hbar": hbar,
                "ds_seed": ds_seed, "ds_scale": ds_scale},
    )


def limit_sweep_L(lam: float, ell: float, hbar: float, L_values,
                  ds_seed: int, sig: Signature = qpstate.SIG_1_4,
                  ds_scale: float = DEFAULT_DS_SCALE) -> SweepReport:
    """Approach to the momentum hyperboloid as L grows; the mirror of
    limit_sweep_ell with the order fitted against 1/L. The residual falls
    like 2 lambda / L to leading order.
    """
    L_values = [float(v) for v in L_values]
    if not L_values:
        raise ValueError("L_values must be non-empty")
    if any(v2 <= v1 for v1, v2 in zip(L_values, L_values[1:])):
        raise ValueError("L_values must be strictly increasing")
    if any(v <= ell for v in L_values):
        raise InvalidScales("every swept L must be > ell")
    metric = build_metric(sig)
    points = []
    for i, L in enumerate(L_values):
        scales = ScaleConfig(hbar=hbar, ell=ell, L=L)
        kappa = conic_kappa_root(conic_coefficients(scales), lam, hbar)
        frame = random_de_sitter(sig, numerics.RngStream(ds_seed, i), ds_scale)
        mean_p = kappa * frame.a[sig.n - 1, :]
        points.append((L, residual_p(mean_p, scales, metric)))
    residuals = [r for _, r in points]
    return SweepReport(
        points=tuple(points),
        fitted_order=_fit_order([1.0 / v for v in L_values], residuals),
        final_residual=residuals[-1],
        config={"sweep": "L", "lambda": lam, "ell": ell, "hbar": hbar,
                "ds_seed": ds_seed, "ds_scale": ds_scale},
    )


def born_duality_check(scales: ScaleConfig, sig: Signature = qpstate.SIG_1_4) -> dict:
    """Coordinate/momentum exchange by the Fourier element with
    c = hbar/(2 ell L).

    Acting on row vectors, (p | x) -> (c x | -p/c), so the coordinate
    anchors (0, +-L) map to the momentum anchors (+-hbar/2ell, 0); the
    canonical covariance maps to itself with Q -> -Q; Gamma is unchanged.
    Returns the measured residual of each statement.
    """
    metric = build_metric(sig)
    c = scales.p_max / scales.L
    m_f = fourier_lct(sig, c)
    n = sig.n

    mean_map = 0.0
    residual_p_image = 0.0
    cov_residual = 0.0
    gamma_change = 0.0
    for sign in (+1.0, -1.0):
        state = canonical_state(sig, scales, kappa=0.0, lam=sign * scales.L)
        image = transform_state(state, m_f)

        expected_p = np.zeros(n)
        expected_p[n - 1] = sign * scales.p_max
        mean_map = max(mean_map,
                       float(np.max(np.abs(image.mean.p - expected_p))),
                       float(np.max(np.abs(image.mean.x))))
        residual_p_image = max(residual_p_image,
                               residual_p(image.mean.p, scales, metric))

        flipped = state.cov.sigma.copy()
        flipped[:n, n:] *= -1.0
        flipped[n:, :n] *= -1.0
        cov_residual = max(cov_residual,
                           numerics.fro(image.cov.sigma - flipped)
                           / numerics.fro(flipped))

        g0 = gamma_invariant(state)
        gamma_change = max(gamma_change, abs(gamma_invariant(image) - g0) / abs(g0))

    twice = sympgroup.compose_lct(m_f, m_f)
    involution = numerics.fro(twice.m + np.eye(2 * n)) / numerics.fro(np.eye(2 * n))

    state = canonical_state(sig, scales, kappa=0.0, lam=scales.L)
    double = transform_state(transform_state(state, m_f), m_f)
    mean_negation = float(np.max(np.abs(double.mean.vector + state.mean.vector)))
    cov_roundtrip = (numerics.fro(double.cov.sigma - state.cov.sigma)
                     / numerics.fro(state.cov.sigma))

    return {
        "fourier_scale": c,
        "mean_map_residual": mean_map,
        "residual_p_of_image": residual_p_image,
        "cov_self_dual_residual": cov_residual,
        "gamma_relative_change": gamma_change,
        "involution_residual": involution,
        "double_map_mean_negation": mean_negation,
        "double_map_cov_residual": cov_roundtrip,
    }


def _json_safe(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def sweep_to_json(report: SweepReport) -> str:
    payload = asdict(report)
    payload["fitted_order"] = _json_safe(report.fitted_order)
    payload["points"] = [list(pt) for pt in report.points]
    return json.dumps(payload)


def sweep_to_csv(report: SweepReport) -> str:
    lines = ["scale,residual"]
    for scale, residual in report.points:
        lines.append(f"{scale!r},{residual!r}")
    lines.append(f"# fitted_order={report.fitted_order!r}")
    lines.append(f"# final_residual={report.final_residual!r}")
    return "\n".join(lines) + "\n"


def gamma_on_conic_state(scales: ScaleConfig, theta: float,
                         sig: Signature = qpstate.SIG_1_4) -> QpsState:
    """Canonical state whose means sit on the conic at angle theta."""
    pt = conic_point(scales, theta)
    return canonical_state(sig, scales, kappa=pt.kappa, lam=pt.lam)
