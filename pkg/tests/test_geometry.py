"""Tests for the conic, the asymptotic limits, and the duality check."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qps import geometry, numerics, qpstate, sympgroup
from qps.errors import ConicNoRealRoot, DimensionMismatch, InvalidScales
from qps.geometry import (
    born_duality_check,
    conic_coefficients,
    conic_kappa_root,
    conic_lambda_root,
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
from qps.qpstate import ScaleConfig, canonical_state, gamma_invariant, transform_state

SIG = qpstate.SIG_1_4
DESK = ScaleConfig(1.0, 0.5, 2.0)
METRIC = sympgroup.build_metric(SIG)


class TestConic:
    def test_reference_coefficients(self):
        k = conic_coefficients(DESK)
        assert k.a == pytest.approx(16.0)
        assert k.b == pytest.approx(-7.745966692414834)
        assert k.c == pytest.approx(4.0)
        assert k.gamma_star == pytest.approx(16.0)
        assert k.discriminant() == pytest.approx(4.0, rel=1e-12)

    def test_degenerate_coefficients(self):
        k = conic_coefficients(ScaleConfig(1.0, 2.0, 2.0))
        assert k.b == 0.0
        assert k.discriminant() == pytest.approx(4.0, rel=1e-12)

    def test_discriminant_identity_across_scales(self):
        for scales in (DESK, ScaleConfig(2.0, 0.1, 30.0), ScaleConfig(0.3, 1.0, 1.0)):
            k = conic_coefficients(scales)
            target = 4.0 / scales.hbar ** 2
            assert abs(k.discriminant() - target) <= 1e-12 * target

    def test_point_theta_zero(self):
        pt = conic_point(DESK, 0.0)
        assert pt.kappa == pytest.approx(1.0)
        assert pt.lam == 0.0

    def test_point_on_lambda_axis(self):
        # sin t = ell/L with cos t < 0 makes kappa cancel exactly
        theta = math.pi - math.asin(DESK.ell / DESK.L)
        pt = conic_point(DESK, theta)
        assert pt.kappa == pytest.approx(0.0, abs=1e-12)
        assert pt.lam == pytest.approx(DESK.L)

    def test_point_theta_half_pi(self):
        pt = conic_point(DESK, math.pi / 2.0)
        assert pt.kappa == pytest.approx(3.872983346207417)
        assert pt.lam == pytest.approx(8.0)
        assert conic_coefficients(DESK).evaluate(pt.kappa, pt.lam) == pytest.approx(16.0)

    def test_containment_256_angles(self):
        k = conic_coefficients(DESK)
        for j in range(256):
            pt = conic_point(DESK, 2.0 * math.pi * j / 256.0)
            value = k.evaluate(pt.kappa, pt.lam)
            assert abs(value - k.gamma_star) <= 1e-10 * k.gamma_star

    def test_lambda_root_branch(self):
        k = conic_coefficients(DESK)
        assert conic_lambda_root(k, 0.0, DESK.hbar) == pytest.approx(DESK.L)
        # continuity: small kappa moves the root smoothly off +L
        lam_eps = conic_lambda_root(k, 1e-8, DESK.hbar)
        assert abs(lam_eps - DESK.L) < 1e-6

    def test_kappa_root_branch(self):
        k = conic_coefficients(DESK)
        assert conic_kappa_root(k, 0.0, DESK.hbar) == pytest.approx(DESK.p_max)

    def test_roots_lie_on_conic(self):
        k = conic_coefficients(DESK)
        for kappa in (0.0, 0.5, -0.7, 2.0):
            lam = conic_lambda_root(k, kappa, DESK.hbar)
            assert k.evaluate(kappa, lam) == pytest.approx(k.gamma_star, rel=1e-10)

    def test_no_real_root(self):
        scales = ScaleConfig(1.0, 1.8, 2.0)
        with pytest.raises(ConicNoRealRoot):
            conic_lambda_root(conic_coefficients(scales), 5.0, scales.hbar)


class TestEtaForms:
    def test_contraction_examples(self):
        assert eta_contraction([1, 0, 0, 0, 0], METRIC) == 1.0
        assert eta_contraction([1.5, 0, 0, 0, 2.5], METRIC) == pytest.approx(-4.0)
        assert eta_contraction(np.zeros(5), METRIC) == 0.0

    def test_contraction_dimension_guard(self):
        with pytest.raises(DimensionMismatch):
            eta_contraction([1.0, 2.0], METRIC)

    def test_residual_x_anchor(self):
        assert residual_x([0, 0, 0, 0, 2.0], DESK, METRIC) == 0.0
        assert residual_x(np.zeros(5), DESK, METRIC) == 1.0

    def test_residual_x_boost_invariant(self):
        frame = sympgroup.boost(SIG, 0, 4, 0.693147)
        boosted = 2.0 * frame.a[4, :]
        assert residual_x(boosted, DESK, METRIC) <= 1e-12

    def test_residual_p_anchor(self):
        assert residual_p([0, 0, 0, 0, 1.0], DESK, METRIC) == 0.0
        assert residual_p(np.zeros(5), DESK, METRIC) == 1.0

    def test_residual_p_de_sitter_invariant(self):
        for k in range(20):
            frame = sympgroup.random_de_sitter(SIG, numerics.RngStream(17, k))
            moved = DESK.p_max * frame.a[4, :]
            assert residual_p(moved, DESK, METRIC) <= 1e-12


class TestScaledEquation:
    def test_on_conic(self):
        s = geometry.gamma_on_conic_state(DESK, 0.0)
        assert scaled_equation_lhs(s) == pytest.approx(1.0, rel=1e-12)

    def test_transported(self):
        s = geometry.gamma_on_conic_state(DESK, 1.1)
        for k in range(100):
            t = transform_state(s, sympgroup.random_lct(SIG, numerics.RngStream(23, k)))
            assert scaled_equation_lhs(t) == pytest.approx(1.0, rel=1e-9)

    def test_zero_mean(self):
        assert scaled_equation_lhs(canonical_state(SIG, DESK, 0.0, 0.0)) == 0.0


class TestTwoPathIdentity:
    def test_identity_frame_reduces_to_conic_form(self):
        k = conic_coefficients(DESK)
        ident = sympgroup.as_de_sitter(np.eye(5), SIG)
        got = general_frame_gamma(1.0, 0.7, ident, DESK, METRIC)
        assert got == pytest.approx(k.evaluate(1.0, 0.7), rel=1e-12)

    def test_boost_frame(self):
        frame = sympgroup.boost(SIG, 0, 4, 0.693147)
        got = general_frame_gamma(1.0, 0.0, frame, DESK, METRIC)
        assert got == pytest.approx(16.0, rel=1e-12)

    def test_hundred_random_pairs(self):
        worst = 0.0
        for k in range(100):
            stream = numerics.RngStream(401, k)
            frame = sympgroup.random_de_sitter(SIG, stream)
            theta = 2.0 * math.pi * k / 100.0
            pt = conic_point(DESK, theta)
            direct = gamma_invariant(transform_state(
                canonical_state(SIG, DESK, pt.kappa, pt.lam),
                sympgroup.embed_de_sitter(frame)))
            frame_value = general_frame_gamma(pt.kappa, pt.lam, frame, DESK, METRIC)
            worst = max(worst, abs(frame_value - direct) / abs(direct))
        assert worst <= 1e-9

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 63 - 1),
           st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=-3.0, max_value=3.0))
    def test_two_path_property(self, seed, kappa, lam):
        frame = sympgroup.random_de_sitter(SIG, numerics.RngStream(seed, 0))
        direct = gamma_invariant(transform_state(
            canonical_state(SIG, DESK, kappa, lam),
            sympgroup.embed_de_sitter(frame)))
        frame_value = general_frame_gamma(kappa, lam, frame, DESK, METRIC)
        assert frame_value == pytest.approx(direct, rel=1e-9, abs=1e-9)


class TestSweeps:
    ELLS = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    LS = [1e2, 1e3, 1e4, 1e5, 1e6]

    def test_ell_sweep_contract(self):
        report = limit_sweep_ell(1.0, 1.0, 1.0, self.ELLS, ds_seed=314)
        assert abs(report.fitted_order - 1.0) <= 0.1
        assert report.final_residual <= 1e-5
        for ell, residual in report.points:
            assert abs(residual - 4.0 * ell) <= 0.25 * 4.0 * ell

    def test_ell_sweep_zero_branch(self):
        report = limit_sweep_ell(0.0, 1.0, 1.0, self.ELLS, ds_seed=314)
        for _, residual in report.points:
            assert residual <= 1e-12

    def test_ell_sweep_frame_independent(self):
        r1 = limit_sweep_ell(1.0, 1.0, 1.0, self.ELLS, ds_seed=1)
        r2 = limit_sweep_ell(1.0, 1.0, 1.0, self.ELLS, ds_seed=2)
        for (_, a), (_, b) in zip(r1.points, r2.points):
            assert abs(a - b) <= 1e-10

    def test_ell_residual_grows_toward_L(self):
        report = limit_sweep_ell(1.0, 1.0, 1.0, [0.3, 0.2, 0.1, 0.05, 0.01],
                                 ds_seed=9)
        residuals = [r for _, r in report.points]
        assert residuals == sorted(residuals, reverse=True)

    def test_L_sweep_contract(self):
        report = limit_sweep_L(1.0, 1.0, 1.0, self.LS, ds_seed=314)
        assert abs(report.fitted_order - 1.0) <= 0.1
        for L, residual in report.points:
            assert abs(residual - 2.0 / L) <= 0.25 * 2.0 / L

    def test_L_sweep_zero_branch(self):
        report = limit_sweep_L(0.0, 1.0, 1.0, self.LS, ds_seed=314)
        for _, residual in report.points:
            assert residual <= 1e-12

    def test_sweep_range_validation(self):
        with pytest.raises(ValueError):
            limit_sweep_ell(1.0, 1.0, 1.0, [1e-6, 1e-2], ds_seed=0)
        with pytest.raises(InvalidScales):
            limit_sweep_ell(1.0, 1.0, 1.0, [2.0, 1.0], ds_seed=0)
        with pytest.raises(ValueError):
            limit_sweep_L(1.0, 1.0, 1.0, [1e6, 1e2], ds_seed=0)
        with pytest.raises(ValueError):
            limit_sweep_ell(1.0, 1.0, 1.0, [], ds_seed=0)

    def test_csv_shape(self):
        report = limit_sweep_ell(1.0, 1.0, 1.0, self.ELLS, ds_seed=314)
        text = sweep_to_csv(report)
        lines = text.strip().split("\n")
        assert lines[0] == "scale,residual"
        assert len(lines) == 1 + len(self.ELLS) + 2
        assert lines[-2].startswith("# fitted_order=")
        assert lines[-1].startswith("# final_residual=")
        first_scale = float(lines[1].split(",")[0])
        assert first_scale == self.ELLS[0]

    def test_json_mirror(self):
        report = limit_sweep_L(1.0, 1.0, 1.0, self.LS, ds_seed=314)
        payload = json.loads(sweep_to_json(report))
        assert payload["final_residual"] == report.final_residual
        assert payload["fitted_order"] == report.fitted_order
        assert len(payload["points"]) == len(self.LS)
        assert payload["config"]["sweep"] == "L"

    def test_json_degenerate_order_is_null(self):
        report = limit_sweep_ell(0.0, 1.0, 1.0, [1e-2, 1e-3], ds_seed=0)
        payload = json.loads(sweep_to_json(report))
        if math.isnan(report.fitted_order):
            assert payload["fitted_order"] is None


class TestBornDuality:
    def test_desk_scale_report(self):
        report = born_duality_check(DESK)
        assert report["fourier_scale"] == pytest.approx(0.5)
        assert report["mean_map_residual"] <= 1e-12
        assert report["residual_p_of_image"] <= 1e-12
        assert report["cov_self_dual_residual"] <= 1e-12
        assert report["gamma_relative_change"] <= 1e-9
        assert report["involution_residual"] <= 1e-12
        assert report["double_map_mean_negation"] <= 1e-12
        assert report["double_map_cov_residual"] <= 1e-12

    def test_other_scales(self):
        for scales in (ScaleConfig(2.0, 0.3, 7.0), ScaleConfig(1.0, 1.0, 1.0)):
            report = born_duality_check(scales)
            assert report["mean_map_residual"] <= 1e-10
            assert report["cov_self_dual_residual"] <= 1e-10
            assert report["gamma_relative_change"] <= 1e-9
