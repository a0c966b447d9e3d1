"""Pseudo-symplectic group machinery for an indefinite metric.

For a signature (n_plus, n_minus) with diagonal metric eta, the group of
linear canonical transformations is represented by 2n x 2n real matrices M
satisfying the membership relation M^T J M = J, where J = [[0, eta],
[-eta, 0]] in (p-block, x-block) ordering. Mean phase vectors transform as
row vectors, v' = v @ M, and covariance matrices by congruence,
Sigma' = M^T @ Sigma @ M; those two statements fix every index convention
used in this package.

The metric-orthogonal subgroup (A^T eta A = eta, det A = 1) embeds
block-diagonally as M = diag(A, A).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import (
    DimensionMismatch,
    NormTooLarge,
    NotDeSitter,
    NotInAlgebra,
    NotSymplectic,
    ZeroScale,
)

TOL_MEMBERSHIP = 1e-10
TOL_DET = 1e-9
TOL_ALGEBRA = 1e-10
MAX_GENERATOR_NORM = 4.0
DEFAULT_GENERATOR_SCALE = 0.3


@dataclass(frozen=True)
class Signature:
    """Counts of +1 and -1 metric entries; the primary case is (1, 4)."""

    n_plus: int
    n_minus: int

    def __post_init__(self):
        if self.n_plus < 0 or self.n_minus < 0 or self.n < 1:
            raise ValueError(f"invalid signature ({self.n_plus}, {self.n_minus})")

    @property
    def n(self) -> int:
        return self.n_plus + self.n_minus


@dataclass(frozen=True)
class Metric:
    """Diagonal metric: n_plus entries +1 followed by n_minus entries -1."""

    diag: np.ndarray

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag)


def build_metric(sig: Signature) -> Metric:
    diag = np.concatenate([np.ones(sig.n_plus), -np.ones(sig.n_minus)])
    return Metric(diag=diag)


def build_symplectic_form(sig: Signature) -> np.ndarray:
    """The 2n x 2n form J = [[0, eta], [-eta, 0]]; J^T = -J and J^2 = -I."""
    eta = build_metric(sig).matrix
    n = sig.n
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = eta
    j[n:, :n] = -eta
    return j


@dataclass(frozen=True)
class LctMatrix:
    """A 2n x 2n member of the pseudo-symplectic group.

    ``deviation`` is the relative Frobenius deviation of M^T J M from J
    measured at construction time.
    """

    sig: Signature
    m: np.ndarray
    deviation: float

    @property
    def n(self) -> int:
        return self.sig.n


@dataclass(frozen=True)
class DeSitterMatrix:
    """An n x n metric-orthogonal, unimodular matrix (identity component)."""

    sig: Signature
    a: np.ndarray
    deviation: float

    @property
    def n(self) -> int:
        return self.sig.n

    def inverse(self) -> np.ndarray:
        """Exact inverse eta A^T eta, valid because A^T eta A = eta."""
        eta = build_metric(self.sig).matrix
        return eta @ self.a.T @ eta


def is_symplectic(m, sig: Signature, tol: float = TOL_MEMBERSHIP):
    """Measure membership: returns (passes, deviation) with
    deviation = ||M^T J M - J||_F / ||J||_F."""
    m = np.asarray(m, dtype=float)
    if m.shape != (2 * sig.n, 2 * sig.n):
        raise DimensionMismatch(
            f"expected shape {(2 * sig.n, 2 * sig.n)}, got {m.shape}"
        )
    j = build_symplectic_form(sig)
    deviation = numerics.fro(m.T @ j @ m - j) / numerics.fro(j)
    return deviation <= tol, deviation


def as_lct(m, sig: Signature, tol: float = TOL_MEMBERSHIP) -> LctMatrix:
    """Validate membership and the unit-determinant invariant, then wrap."""
    m = np.asarray(m, dtype=float)
    ok, deviation = is_symplectic(m, sig, tol)
    if not ok:
        raise NotSymplectic(deviation, tol)
    d = numerics.det(m)
    if abs(d - 1.0) > TOL_DET:
        raise NotSymplectic(abs(d - 1.0), TOL_DET)
    return LctMatrix(sig=sig, m=m, deviation=deviation)


def random_sp_generator(sig: Signature, stream: numerics.RngStream,
                        scale: float = DEFAULT_GENERATOR_SCALE) -> np.ndarray:
    """Random element S = J K of the symplectic algebra.

    K is a symmetrized matrix of uniform entries in [-scale, scale]; the
    identity (JK)^T J + J (JK) = K J^T J + J^2 K = K - K = 0 then puts S in
    the algebra, so expm(S) lies in the group.
    """
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    d = 2 * sig.n
    r = stream.uniform_matrix(scale, d, d)
    k = 0.5 * (r + r.T)
    return build_symplectic_form(sig) @ k


def algebra_deviation(s, sig: Signature) -> float:
    """Frobenius norm of S^T J + J S (zero for algebra elements)."""
    j = build_symplectic_form(sig)
    return numerics.fro(s.T @ j + j @ s)


def exp_to_group(s, sig: Signature, tol: float = TOL_MEMBERSHIP) -> LctMatrix:
    """Exponentiate an algebra element into a validated group element."""
    s = np.asarray(s, dtype=float)
    dev = algebra_deviation(s, sig)
    if dev > TOL_ALGEBRA:
        raise NotInAlgebra(
            f"algebra deviation {dev:.3e} exceeds {TOL_ALGEBRA:.1e}"
        )
    norm = numerics.fro(s)
    if norm > MAX_GENERATOR_NORM:
        raise NormTooLarge(
            f"generator norm {norm:.3f} exceeds {MAX_GENERATOR_NORM}"
        )
    return as_lct(numerics.expm(s), sig, tol)


def random_lct(sig: Signature, stream: numerics.RngStream,
               scale: float = DEFAULT_GENERATOR_SCALE) -> LctMatrix:
    return exp_to_group(random_sp_generator(sig, stream, scale), sig)


def random_de_sitter(sig: Signature, stream: numerics.RngStream,
                     scale: float = DEFAULT_GENERATOR_SCALE) -> DeSitterMatrix:
    """Random identity-component element A = expm(eta W), W antisymmetric.

    (eta W)^T eta + eta (eta W) = -W + W = 0, so the exponential satisfies
    A^T eta A = eta with det A = 1.
    """
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    n = sig.n
    r = stream.uniform_matrix(scale, n, n)
    w = 0.5 * (r - r.T)
    omega = build_metric(sig).matrix @ w
    return as_de_sitter(numerics.expm(omega), sig)


def as_de_sitter(a, sig: Signature, tol: float = TOL_MEMBERSHIP) -> DeSitterMatrix:
    a = np.asarray(a, dtype=float)
    if a.shape != (sig.n, sig.n):
        raise DimensionMismatch(f"expected shape {(sig.n, sig.n)}, got {a.shape}")
    eta = build_metric(sig).matrix
    deviation = numerics.fro(a.T @ eta @ a - eta)
    if deviation > tol:
        raise NotDeSitter(
            f"metric-orthogonality deviation {deviation:.3e} exceeds {tol:.1e}"
        )
    d = numerics.det(a)
    if abs(d - 1.0) > TOL_DET:
        raise NotDeSitter(f"determinant {d} is not 1 within {TOL_DET:.1e}")
    return DeSitterMatrix(sig=sig, a=a, deviation=deviation)


def boost(sig: Signature, axis_plus: int, axis_minus: int, rapidity: float) -> DeSitterMatrix:
    """Hyperbolic rotation mixing one +1 axis with one -1 axis."""
    if not (0 <= axis_plus < sig.n_plus):
        raise DimensionMismatch(f"axis_plus {axis_plus} not a +1 axis")
    if not (sig.n_plus <= axis_minus < sig.n):
        raise DimensionMismatch(f"axis_minus {axis_minus} not a -1 axis")
    a = np.eye(sig.n)
    c, s = np.cosh(rapidity), np.sinh(rapidity)
    a[axis_plus, axis_plus] = c
    a[axis_minus, axis_minus] = c
    a[axis_plus, axis_minus] = s
    a[axis_minus, axis_plus] = s
    return as_de_sitter(a, sig)


def embed_de_sitter(a: DeSitterMatrix) -> LctMatrix:
    """Block-diagonal embedding diag(A, A) into the LCT group."""
    n = a.n
    m = np.zeros((2 * n, 2 * n))
    m[:n, :n] = a.a
    m[n:, n:] = a.a
    return as_lct(m, a.sig)


def fourier_lct(sig: Signature, c: float) -> LctMatrix:
    """Momentum/coordinate swap M_F = [[0, -I/c], [cI, 0]].

    Satisfies M_F^T J M_F = J exactly and M_F^2 = -I. Acting on a row
    vector (p | x) it sends the means to (c x | -p/c).
    """
    if c == 0:
        raise ZeroScale("fourier scale c must be nonzero")
    n = sig.n
    m = np.zeros((2 * n, 2 * n))
    m[:n, n:] = -np.eye(n) / c
    m[n:, :n] = c * np.eye(n)
    return as_lct(m, sig)


def decompose_blocks(lct: LctMatrix, scales):
    """Recover the dimensionless blocks (A, B, C, D) of the group element.

    Layout: M = [[A, (ell^2/hbar) C], [(hbar/L^2) B, D]].
    """
    n = lct.n
    m = lct.m
    a = m[:n, :n].copy()
    c = m[:n, n:] * (scales.hbar / scales.ell ** 2)
    b = m[n:, :n] * (scales.L ** 2 / scales.hbar)
    d = m[n:, n:].copy()
    return a, b, c, d


def compose_lct(m1: LctMatrix, m2: LctMatrix) -> LctMatrix:
    """Group product; membership of the result is re-validated with an
    allowance of twice the summed input deviations plus rounding."""
    if m1.sig != m2.sig:
        raise DimensionMismatch("cannot compose elements over different signatures")
    tol = max(TOL_MEMBERSHIP, 2.0 * (m1.deviation + m2.deviation) + 1e-12)
    return as_lct(m1.m @ m2.m, m1.sig, tol)


def lct_inverse(lct: LctMatrix) -> LctMatrix:
    """Inverse via the closed form M^{-1} = -J M^T J."""
    j = build_symplectic_form(lct.sig)
    tol = max(TOL_MEMBERSHIP, 2.0 * lct.deviation + 1e-12)
    return as_lct(-j @ lct.m.T @ j, lct.sig, tol)


def lct_to_json(lct: LctMatrix, scales) -> str:
    """Serialize to the wire schema:
    {"n_plus", "n_minus", "hbar", "ell", "L", "m": [[...]]}."""
    payload = {
        "n_plus": lct.sig.n_plus,
        "n_minus": lct.sig.n_minus,
        "hbar": scales.hbar,
        "ell": scales.ell,
        "L": scales.L,
        "m": lct.m.tolist(),
    }
    return json.dumps(payload)


def lct_from_json(text: str, tol: float = TOL_MEMBERSHIP):
    """Parse the wire schema; returns (LctMatrix, ScaleConfig).

    Raises KeyError/ValueError on malformed input and NotSymplectic when
    the matrix fails membership.
    """
    from .qpstate import ScaleConfig  # deferred: qpstate imports this module

    data = json.loads(text)
    sig = Signature(int(data["n_plus"]), int(data["n_minus"]))
    scales = ScaleConfig(float(data["hbar"]), float(data["ell"]), float(data["L"]))
    m = np.array(data["m"], dtype=float)
    if m.shape != (2 * sig.n, 2 * sig.n):
        raise ValueError(f"matrix shape {m.shape} inconsistent with signature {sig}")
    return as_lct(m, sig, tol), scales
