"""Phase-space states: means, covariances, the scalar invariant, and a 1D
Gaussian oracle.

A state is a mean row vector v = (p | x) together with a symmetric positive
definite covariance matrix Sigma = [[P, Q], [Q^T, X]]. Group elements act by
v' = v @ M and Sigma' = M^T @ Sigma @ M, and the scalar

    Gamma = v . Sigma^{-1} . v^T

is unchanged under that action for any invertible M (substitute and cancel).

The canonical family is built in a reference frame where the covariance
blocks are multiples of the identity, every axis saturates the uncertainty
product P X - Q^2 = hbar^2/4, and the means point along the last axis with
free components (kappa, lambda). Each axis of such a state is realized by a
complex-quadratic Gaussian wavepacket; the quadrature oracle integrates that
wavepacket directly and must reproduce the matching covariance entries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidScales,
    NonFinite,
    NonPositiveVariance,
    QuadratureNotConverged,
)
from .sympgroup import LctMatrix, Signature, as_lct

PROVENANCE_CANONICAL = "CanonicalF0"
PROVENANCE_TRANSFORMED = "Transformed"

# Largest (L/ell)^2 representable with usable headroom in float64: the
# invariant itself is L^2/ell^2 and intermediate squares reach its square.
MAX_SCALE_RATIO_SQ = 1e12

SIG_1_4 = Signature(1, 4)


@dataclass(frozen=True)
class ScaleConfig:
    """The three dimensionful constants: an action hbar, a short length ell
    (minimal coordinate uncertainty), a long length L (maximal one)."""

    hbar: float
    ell: float
    L: float

    def __post_init__(self):
        for name in ("hbar", "ell", "L"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise InvalidScales(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise InvalidScales(f"{name} must be positive, got {value}")
        if self.L < self.ell:
            raise InvalidScales("L must be >= ell")
        if (self.L / self.ell) ** 2 > MAX_SCALE_RATIO_SQ:
            raise InvalidScales(
                f"(L/ell)^2 = {(self.L / self.ell) ** 2:.3e} exceeds "
                f"{MAX_SCALE_RATIO_SQ:.0e}; the invariant and its squares "
                "would lose all precision in double-precision arithmetic"
            )

    @property
    def gamma_star(self) -> float:
        """The distinguished invariant value L^2/ell^2."""
        return (self.L / self.ell) ** 2

    @property
    def p_max(self) -> float:
        """hbar/(2 ell), the momentum scale dual to L."""
        return self.hbar / (2.0 * self.ell)


@dataclass(frozen=True)
class PhaseMean:
    """Mean momenta and coordinates; the combined row vector is (p | x)."""

    p: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if p.ndim != 1 or x.ndim != 1 or len(p) != len(x):
            raise DimensionMismatch(
                f"mean vectors must be 1d of equal length, got {p.shape}, {x.shape}"
            )
        if not (np.isfinite(p).all() and np.isfinite(x).all()):
            raise NonFinite("mean vector has non-finite entries")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.x])


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric positive definite 2n x 2n matrix in (p | x) block order."""

    sigma: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
            raise DimensionMismatch(f"covariance must be 2n x 2n, got {sigma.shape}")
        if not np.isfinite(sigma).all():
            raise NonFinite("covariance has non-finite entries")
        if not numerics.is_symmetric(sigma):
            raise DimensionMismatch("covariance is not symmetric to 1e-12 relative")
        if not numerics.is_positive_definite(sigma):
            raise NonPositiveVariance("covariance is not positive definite")
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return self.sigma.shape[0] // 2

    def blocks(self):
        """(P, Q, X) with Sigma = [[P, Q], [Q^T, X]]."""
        n = self.n
        s = self.sigma
        return s[:n, :n], s[:n, n:], s[n:, n:]


@dataclass(frozen=True)
class QpsState:
    sig: Signature
    scales: ScaleConfig
    mean: PhaseMean
    cov: CovarianceMatrix
    provenance: str

    def __post_init__(self):
        if self.mean.n != self.sig.n or self.cov.n != self.sig.n:
            raise DimensionMismatch(
                f"state dimensions (mean n={self.mean.n}, cov n={self.cov.n}) "
                f"do not match signature n={self.sig.n}"
            )
        if self.provenance not in (PROVENANCE_CANONICAL, PROVENANCE_TRANSFORMED):
            raise ValueError(f"unknown provenance {self.provenance!r}")


def canonical_covariance_entries(scales: ScaleConfig):
    """Per-axis (P, Q, X) of the saturated reference state."""
    p = scales.hbar ** 2 / (4.0 * scales.ell ** 2)
    x = scales.L ** 2
    q = scales.p_max * math.sqrt(scales.L ** 2 - scales.ell ** 2)
    return p, q, x


def canonical_state(sig: Signature, scales: ScaleConfig,
                    kappa: float, lam: float) -> QpsState:
    """Saturated state in the reference frame: means (0,..,0,kappa | 0,..,0,lam)
    and covariance blocks P = (hbar^2/4 ell^2) I, X = L^2 I,
    Q = (hbar/2 ell) sqrt(L^2 - ell^2) I. Every axis has P X - Q^2 = hbar^2/4
    identically."""
    n = sig.n
    p_val, q_val, x_val = canonical_covariance_entries(scales)
    mean_p = np.zeros(n)
    mean_x = np.zeros(n)
    mean_p[n - 1] = kappa
    mean_x[n - 1] = lam
    sigma = np.zeros((2 * n, 2 * n))
    sigma[:n, :n] = p_val * np.eye(n)
    sigma[n:, n:] = x_val * np.eye(n)
    sigma[:n, n:] = q_val * np.eye(n)
    sigma[n:, :n] = q_val * np.eye(n)
    return QpsState(
        sig=sig,
        scales=scales,
        mean=PhaseMean(p=mean_p, x=mean_x),
        cov=CovarianceMatrix(sigma=sigma),
        provenance=PROVENANCE_CANONICAL,
    )


def transform_state(s: QpsState, m: LctMatrix) -> QpsState:
    """Push a state through a group element: v' = v M, Sigma' = M^T Sigma M."""
    if m.sig != s.sig:
        raise DimensionMismatch("state and transformation signatures differ")
    n = s.sig.n
    v = s.mean.vector @ m.m
    sigma = m.m.T @ s.cov.sigma @ m.m
    sigma = 0.5 * (sigma + sigma.T)  # congruence is symmetric up to rounding
    return QpsState(
        sig=s.sig,
        scales=s.scales,
        mean=PhaseMean(p=v[:n], x=v[n:]),
        cov=CovarianceMatrix(sigma=sigma),
        provenance=PROVENANCE_TRANSFORMED,
    )


def gamma_invariant(s: QpsState) -> float:
    """Gamma = v . Sigma^{-1} . v^T, evaluated by a linear solve against
    Sigma (never by forming the inverse)."""
    v = s.mean.vector
    return float(v @ numerics.solve(s.cov.sigma, v))


def saturation_residual(s: QpsState, axis: int) -> float:
    """P_aa X_aa - Q_aa^2 - hbar^2/4 for one axis (no summation); identically
    zero for canonical states."""
    n = s.sig.n
    if not (0 <= axis < n):
        raise IndexOutOfRange(f"axis {axis} out of range for n={n}")
    p, q, x = s.cov.blocks()
    return p[axis, axis] * x[axis, axis] - q[axis, axis] ** 2 - s.scales.hbar ** 2 / 4.0


def canonical_cov_inverse_closed_form(sig: Signature, scales: ScaleConfig) -> np.ndarray:
    """Closed-form inverse of the canonical covariance:
    [[(4L^2/hbar^2) I, -(2/(ell hbar)) sqrt(L^2-ell^2) I],
     [same off-diagonal, (1/ell^2) I]]."""
    n = sig.n
    a = 4.0 * scales.L ** 2 / scales.hbar ** 2
    b = -2.0 * math.sqrt(scales.L ** 2 - scales.ell ** 2) / (scales.ell * scales.hbar)
    c = 1.0 / scales.ell ** 2
    inv = np.zeros((2 * n, 2 * n))
    inv[:n, :n] = a * np.eye(n)
    inv[:n, n:] = b * np.eye(n)
    inv[n:, :n] = b * np.eye(n)
    inv[n:, n:] = c * np.eye(n)
    return inv


def cov_determinant(s: QpsState) -> float:
    """det(Sigma); equals (hbar^2/4)^n for canonical states and is preserved
    by transform_state because group elements have unit determinant."""
    return numerics.det(s.cov.sigma)


@dataclass(frozen=True)
class GaussianParams:
    """One axis of a saturated state as a complex Gaussian
    psi(x) = N exp(-(a_r + i a_i)(x - x_bar)^2 + i p_bar (x - x_bar)/hbar)."""

    a_r: float
    a_i: float
    x_bar: float
    p_bar: float
    K_phase: float = 0.0

    def __post_init__(self):
        if self.a_r <= 0:
            raise NonPositiveVariance(f"a_r must be positive, got {self.a_r}")


def gaussian_from_cov(x_var: float, q_cov: float, x_bar: float, p_bar: float,
                      hbar: float) -> GaussianParams:
    """Gaussian parameters from the per-axis covariance entries X and Q.

    a_r = 1/(4X) and a_i = -Q/(2 hbar X); the implied momentum variance
    (hbar^2/4 + Q^2)/X saturates the uncertainty product exactly.
    """
    if x_var <= 0:
        raise NonPositiveVariance(f"coordinate variance must be positive, got {x_var}")
    return GaussianParams(
        a_r=1.0 / (4.0 * x_var),
        a_i=-q_cov / (2.0 * hbar * x_var),
        x_bar=x_bar,
        p_bar=p_bar,
    )


def gaussian_closed_moments(g: GaussianParams, hbar: float):
    """Exact moments of the complex Gaussian: var_x = 1/(4 a_r),
    var_p = hbar^2 (a_r^2 + a_i^2)/a_r, cov_q = -hbar a_i/(2 a_r)."""
    var_x = 1.0 / (4.0 * g.a_r)
    var_p = hbar ** 2 * (g.a_r ** 2 + g.a_i ** 2) / g.a_r
    cov_q = -hbar * g.a_i / (2.0 * g.a_r)
    return g.x_bar, var_x, g.p_bar, var_p, cov_q


@dataclass(frozen=True)
class QuadratureConfig:
    node_count: int = 256
    window_sigmas: float = 10.0

    def __post_init__(self):
        if self.node_count < 64:
            raise ValueError(f"node_count must be >= 64, got {self.node_count}")
        if self.window_sigmas < 8:
            raise ValueError(f"window_sigmas must be >= 8, got {self.window_sigmas}")


@dataclass(frozen=True)
class GaussianMoments:
    mean_x: float
    var_x: float
    mean_p: float
    var_p: float
    cov_q: float

    def as_tuple(self):
        return (self.mean_x, self.var_x, self.mean_p, self.var_p, self.cov_q)


def _simpson_weights(intervals: int, h: float) -> np.ndarray:
    w = np.ones(intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def _raw_moments(g: GaussianParams, hbar: float, intervals: int, window: float):
    """Simpson moments on [x_bar - w sigma, x_bar + w sigma], using the
    analytic derivative psi' = psi (-2(a_r + i a_i) u + i p_bar/hbar)."""
    sigma = 1.0 / (2.0 * math.sqrt(g.a_r))
    half = window * sigma
    u = np.linspace(-half, half, intervals + 1)
    w = _simpson_weights(intervals, 2.0 * half / intervals)

    alpha = g.a_r + 1j * g.a_i
    psi = np.exp(-alpha * u ** 2 + 1j * g.p_bar * u / hbar)
    dpsi = psi * (-2.0 * alpha * u + 1j * g.p_bar / hbar)
    density = (psi.conj() * psi).real
    overlap = psi.conj() * dpsi

    norm = float(w @ density)
    mean_u = float(w @ (u * density)) / norm
    var_x = float(w @ ((u - mean_u) ** 2 * density)) / norm
    mean_p = hbar * float(np.imag(w @ overlap)) / norm
    p_sq = hbar ** 2 * float(w @ (dpsi.conj() * dpsi).real) / norm
    cov_q = hbar * float(np.imag(w @ ((u - mean_u) * overlap))) / norm

    return GaussianMoments(
        mean_x=g.x_bar + mean_u,
        var_x=var_x,
        mean_p=mean_p,
        var_p=p_sq - mean_p ** 2,
        cov_q=cov_q,
    )


def gaussian_moments_quadrature(g: GaussianParams, hbar: float,
                                quad: QuadratureConfig = QuadratureConfig()) -> GaussianMoments:
    """Numerically integrated (mean_x, var_x, mean_p, var_p, cov_q).

    One refinement halving is performed; if any moment moves by more than
    1e-8 (relative to max(1, magnitude)) the quadrature has not converged.
    """
    intervals = quad.node_count + (quad.node_count % 2)
    coarse = _raw_moments(g, hbar, intervals, quad.window_sigmas)
    fine = _raw_moments(g, hbar, 2 * intervals, quad.window_sigmas)
    for m1, m2 in zip(coarse.as_tuple(), fine.as_tuple()):
        if abs(m1 - m2) > 1e-8 * max(1.0, abs(m1), abs(m2)):
            raise QuadratureNotConverged(
                f"refinement moved a moment from {m1!r} to {m2!r}"
            )
    return fine


def state_to_json(s: QpsState) -> str:
    """Wire schema: {"n_plus", "n_minus", "hbar", "ell", "L",
    "mean_p", "mean_x", "cov", "provenance"}; indices 0..n-1 are momenta,
    n..2n-1 coordinates."""
    payload = {
        "n_plus": s.sig.n_plus,
        "n_minus": s.sig.n_minus,
        "hbar": s.scales.hbar,
        "ell": s.scales.ell,
        "L": s.scales.L,
        "mean_p": s.mean.p.tolist(),
        "mean_x": s.mean.x.tolist(),
        "cov": s.cov.sigma.tolist(),
        "provenance": s.provenance,
    }
    return json.dumps(payload)


def state_from_json(text: str) -> QpsState:
    data = json.loads(text)
    sig = Signature(int(data["n_plus"]), int(data["n_minus"]))
    scales = ScaleConfig(float(data["hbar"]), float(data["ell"]), float(data["L"]))
    mean = PhaseMean(
        p=np.array(data["mean_p"], dtype=float),
        x=np.array(data["mean_x"], dtype=float),
    )
    cov = CovarianceMatrix(sigma=np.array(data["cov"], dtype=float))
    return QpsState(sig=sig, scales=scales, mean=mean, cov=cov,
                    provenance=str(data["provenance"]))


def identity_lct(sig: Signature) -> LctMatrix:
    return as_lct(np.eye(2 * sig.n), sig)
