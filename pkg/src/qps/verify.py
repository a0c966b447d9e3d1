"""Named check suites over all module invariants, for the CLI and CI.

Every check measures a worst-case error across seeded trials and compares
it against that check's own tolerance; a tolerance override (the sabotage
knob) replaces all of them at once.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import __version__, geometry, numerics, qpstate, sympgroup
from .qpstate import ScaleConfig, canonical_state, gamma_invariant, transform_state

# stream-index bases keep the suites' random draws decorrelated
_BASE_MEMBERSHIP = 0
_BASE_GAMMA = 10_000
_BASE_TWO_PATH = 20_000
_BASE_DETERMINANT = 30_000
_BASE_SCALED = 40_000


@dataclass(frozen=True)
class Check:
    name: str
    max_error: float
    tolerance: float
    passed: bool


def _check(name: str, max_error: float, tolerance: float,
           tol_override) -> Check:
    tol = float(tolerance if tol_override is None else tol_override)
    max_error = float(max_error)
    return Check(name=name, max_error=max_error, tolerance=tol,
                 passed=bool(max_error <= tol))


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple
    overall_pass: bool
    config: dict
    version: str


def check_symplectic_membership(scales, seed, trials, tol_override=None,
                                sig=qpstate.SIG_1_4):
    worst_dev = 0.0
    worst_det = 0.0
    for k in range(trials):
        m = sympgroup.random_lct(sig, numerics.RngStream(seed, _BASE_MEMBERSHIP + k))
        worst_dev = max(worst_dev, m.deviation)
        worst_det = max(worst_det, abs(numerics.det(m.m) - 1.0))
    return [
        _check("symplectic_membership", worst_dev, 1e-10, tol_override),
        _check("symplectic_determinant", worst_det, 1e-9, tol_override),
    ]


def check_gamma_invariance(scales, seed, trials, tol_override=None,
                           sig=qpstate.SIG_1_4):
    # kappa = hbar/2ell, lambda = 0 sits on the conic, so Gamma = L^2/ell^2
    state = canonical_state(sig, scales, kappa=scales.p_max, lam=0.0)
    reference = scales.gamma_star
    value_err = abs(gamma_invariant(state) - reference) / reference
    worst = 0.0
    for k in range(trials):
        m = sympgroup.random_lct(sig, numerics.RngStream(seed, _BASE_GAMMA + k))
        g = gamma_invariant(transform_state(state, m))
        worst = max(worst, abs(g - reference) / reference)
    return [
        _check("gamma_canonical_value", value_err, 1e-12, tol_override),
        _check("gamma_invariance", worst, 1e-9, tol_override),
    ]


def check_saturation(scales, seed, trials, tol_override=None,
                     sig=qpstate.SIG_1_4):
    stream = numerics.RngStream(seed, 0)
    unit = scales.hbar ** 2 / 4.0
    worst = 0.0
    for kappa, lam in [(0.0, 0.0), (scales.p_max, 0.0), (0.0, scales.L),
                       *[tuple(stream.substream(j).uniform_symmetric(2.0, 2))
                         for j in range(1, 6)]]:
        s = canonical_state(sig, scales, kappa, lam)
        for axis in range(sig.n):
            worst = max(worst, abs(qpstate.saturation_residual(s, axis)) / unit)
    return [_check("saturation_canonical", worst, 1e-13, tol_override)]


def check_cov_inverse(scales, seed, trials, tol_override=None,
                      sig=qpstate.SIG_1_4):
    s = canonical_state(sig, scales, 0.0, 0.0)
    closed = qpstate.canonical_cov_inverse_closed_form(sig, scales)
    eye = np.eye(2 * sig.n)
    product_err = numerics.fro(closed @ s.cov.sigma - eye) / numerics.fro(eye)
    numeric = numerics.solve(s.cov.sigma, eye)
    solve_err = numerics.fro(numeric - closed) / numerics.fro(closed)
    return [
        _check("cov_inverse_product", product_err, 1e-12, tol_override),
        _check("cov_inverse_vs_solve", solve_err, 1e-12, tol_override),
    ]


def check_two_path(scales, seed, trials, tol_override=None,
                   sig=qpstate.SIG_1_4):
    metric = sympgroup.build_metric(sig)
    worst = 0.0
    for k in range(trials):
        frame = sympgroup.random_de_sitter(
            sig, numerics.RngStream(seed, _BASE_TWO_PATH + k))
        pt = geometry.conic_point(scales, 2.0 * math.pi * k / max(trials, 1))
        direct = gamma_invariant(transform_state(
            canonical_state(sig, scales, pt.kappa, pt.lam),
            sympgroup.embed_de_sitter(frame)))
        framed = geometry.general_frame_gamma(pt.kappa, pt.lam, frame,
                                              scales, metric)
        worst = max(worst, abs(framed - direct) / abs(direct))
    return [_check("two_path_gamma", worst, 1e-9, tol_override)]


def check_gaussian(scales, seed, trials, tol_override=None,
                   sig=qpstate.SIG_1_4):
    s = canonical_state(sig, scales, kappa=scales.p_max, lam=scales.L / 2.0)
    p, q, x = s.cov.blocks()
    moment_err = 0.0
    saturation_err = 0.0
    unit = scales.hbar ** 2 / 4.0
    for axis in range(sig.n):
        g = qpstate.gaussian_from_cov(x[axis, axis], q[axis, axis],
                                      x_bar=s.mean.x[axis],
                                      p_bar=s.mean.p[axis],
                                      hbar=scales.hbar)
        mom = qpstate.gaussian_moments_quadrature(g, scales.hbar)
        moment_err = max(
            moment_err,
            abs(mom.var_x - x[axis, axis]) / x[axis, axis],
            abs(mom.var_p - p[axis, axis]) / p[axis, axis],
            abs(mom.cov_q - q[axis, axis]) / max(abs(q[axis, axis]), 1.0),
        )
        saturation_err = max(
            saturation_err,
            abs(mom.var_x * mom.var_p - mom.cov_q ** 2 - unit) / unit,
        )
    return [
        _check("gaussian_quadrature_moments", moment_err, 1e-8, tol_override),
        _check("gaussian_saturation_identity", saturation_err, 1e-10, tol_override),
    ]


def check_born_duality(scales, seed, trials, tol_override=None,
                       sig=qpstate.SIG_1_4):
    report = geometry.born_duality_check(scales, sig)
    structure = max(report["mean_map_residual"],
                    report["residual_p_of_image"],
                    report["cov_self_dual_residual"],
                    report["involution_residual"],
                    report["double_map_mean_negation"],
                    report["double_map_cov_residual"])
    return [
        _check("born_duality_structure", structure, 1e-10, tol_override),
        _check("born_duality_gamma", report["gamma_relative_change"], 1e-9,
               tol_override),
    ]


def check_determinant_transport(scales, seed, trials, tol_override=None,
                                sig=qpstate.SIG_1_4):
    s = canonical_state(sig, scales, kappa=scales.p_max, lam=scales.L)
    d0 = qpstate.cov_determinant(s)
    worst = 0.0
    for k in range(trials):
        m = sympgroup.random_lct(sig, numerics.RngStream(seed, _BASE_DETERMINANT + k))
        d = qpstate.cov_determinant(transform_state(s, m))
        worst = max(worst, abs(d - d0) / d0)
    return [_check("determinant_transport", worst, 1e-9, tol_override)]


def check_conic(scales, seed, trials, tol_override=None,
                sig=qpstate.SIG_1_4):
    coeffs = geometry.conic_coefficients(scales)
    containment = 0.0
    for j in range(256):
        pt = geometry.conic_point(scales, 2.0 * math.pi * j / 256.0)
        value = coeffs.evaluate(pt.kappa, pt.lam)
        containment = max(containment,
                          abs(value - coeffs.gamma_star) / coeffs.gamma_star)
    scaled = 0.0
    state = geometry.gamma_on_conic_state(scales, 0.9, sig)
    for k in range(min(trials, 100)):
        t = transform_state(state, sympgroup.random_lct(
            sig, numerics.RngStream(seed, _BASE_SCALED + k)))
        scaled = max(scaled, abs(geometry.scaled_equation_lhs(t) - 1.0))
    return [
        _check("conic_containment", containment, 1e-10, tol_override),
        _check("scaled_equation_transport", scaled, 1e-9, tol_override),
    ]


_SUITES = (
    check_symplectic_membership,
    check_gamma_invariance,
    check_saturation,
    check_cov_inverse,
    check_two_path,
    check_gaussian,
    check_born_duality,
    check_determinant_transport,
    check_conic,
)


def run_verify(scales: ScaleConfig, seed: int, trials: int,
               tol_override=None) -> VerificationReport:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if tol_override is not None and tol_override <= 0:
        raise ValueError(f"tol must be positive, got {tol_override}")
    checks = []
    for suite in _SUITES:
        checks.extend(suite(scales, seed, trials, tol_override))
    return VerificationReport(
        checks=tuple(checks),
        overall_pass=all(c.passed for c in checks),
        config={"hbar": scales.hbar, "ell": scales.ell, "L": scales.L,
                "seed": seed, "trials": trials, "tol_override": tol_override},
        version=__version__,
    )


def report_to_json(report: VerificationReport) -> str:
    payload = {
        "version": report.version,
        "config": report.config,
        "checks": [
            {"name": c.name, "max_error": c.max_error,
             "tolerance": c.tolerance, "pass": c.passed}
            for c in report.checks
        ],
        "overall_pass": report.overall_pass,
    }
    return json.dumps(payload)


def report_to_csv(report: VerificationReport) -> str:
    lines = ["name,max_error,tolerance,pass"]
    for c in report.checks:
        lines.append(f"{c.name},{c.max_error!r},{c.tolerance!r},{str(c.passed).lower()}")
    lines.append(f"# overall_pass={str(report.overall_pass).lower()}")
    return "\n".join(lines) + "\n"
