"""Dense real matrix kernel.

Everything downstream (group elements, covariance transforms, invariant
evaluation) runs through the primitives in this module: LU solve with
partial pivoting, a scaling-and-squaring matrix exponential, log-log slope
fitting, and a counter-based deterministic random stream.

Matrices are plain 2-D float64 ``numpy.ndarray`` objects throughout; the
functions validate shape and finiteness rather than wrapping arrays in a
bespoke class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientPoints,
    NonFinite,
    NonPositiveValue,
    SingularMatrix,
)

# Pivot magnitudes below PIVOT_FLOOR_SCALE * max|A| abort the factorization.
PIVOT_FLOOR_SCALE = 1e-13

# Frobenius norm of the scaled matrix after halving, before the Taylor core.
_EXPM_TARGET_NORM = 0.5
_EXPM_TAYLOR_ORDER = 18


def fro(a) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class LuFactors:
    """Combined L\\U factors with the pivot permutation and pivot magnitudes."""

    lu: np.ndarray
    perm: np.ndarray
    pivots: np.ndarray

    def condition_estimate(self) -> float:
        """Cheap condition proxy: ratio of largest to smallest pivot magnitude."""
        return float(self.pivots.max() / self.pivots.min())


def lu_factor(a, pivot_floor_scale: float = PIVOT_FLOOR_SCALE) -> LuFactors:
    """LU factorization with partial (row) pivoting.

    Raises :class:`SingularMatrix` with the failing elimination step when a
    pivot magnitude falls to or below ``pivot_floor_scale * max|a|``.
    """
    a = _as_square(a)
    if not np.isfinite(a).all():
        raise NonFinite("matrix has non-finite entries")
    n = a.shape[0]
    lu = a.copy()
    perm = np.arange(n)
    floor = pivot_floor_scale * float(np.abs(a).max())
    pivots = np.empty(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = abs(lu[p, k])
        if pivot <= floor:
            raise SingularMatrix(k, pivot)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        pivots[k] = pivot
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return LuFactors(lu=lu, perm=perm, pivots=pivots)


def lu_solve(factors: LuFactors, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    n = factors.lu.shape[0]
    if b.shape[0] != n:
        raise ValueError(f"rhs has {b.shape[0]} rows, expected {n}")
    lu = factors.lu
    y = b[factors.perm].copy()
    for k in range(1, n):   # forward: L y = P b (unit lower triangle)
        y[k] -= lu[k, :k] @ y[:k]
    for k in range(n - 1, -1, -1):   # backward: U x = y
        y[k] -= lu[k, k + 1:] @ y[k + 1:]
        y[k] /= lu[k, k]
    return y[:, 0] if squeeze else y


def solve(a, b) -> np.ndarray:
    """Solve ``a @ y = b`` by pivoted LU; ``b`` may be a vector or matrix."""
    return lu_solve(lu_factor(a), b)


def inverse(a) -> np.ndarray:
    """Explicit inverse, computed as solve(a, I)."""
    a = _as_square(a)
    return solve(a, np.eye(a.shape[0]))


def det(a) -> float:
    """Determinant from the pivoted LU factorization."""
    factors = lu_factor(_as_square(a))
    # permutation sign from cycle decomposition of perm
    perm = factors.perm
    visited = np.zeros(len(perm), dtype=bool)
    sign = 1.0
    for start in range(len(perm)):
        if visited[start]:
            continue
        length = 0
        j = start
        while not visited[j]:
            visited[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign * float(np.prod(np.diag(factors.lu)))


def condition_estimate(a) -> float:
    return lu_factor(a).condition_estimate()


def expm(s) -> np.ndarray:
    """Matrix exponential via scaling and squaring with a Taylor core.

    The input is halved until its Frobenius norm is at most 0.5, the core
    series is summed by Horner to order 18 (residual ~0.5^19/19! per term,
    far below double precision), and the result is squared back up.
    """
    s = _as_square(s)
    if not np.isfinite(s).all():
        raise NonFinite("matrix has non-finite entries")
    n = s.shape[0]
    norm = fro(s)
    squarings = 0
    if norm > _EXPM_TARGET_NORM:
        squarings = max(0, int(math.ceil(math.log2(norm / _EXPM_TARGET_NORM))))
    a = s / (2.0 ** squarings)
    eye = np.eye(n)
    result = eye + a / _EXPM_TAYLOR_ORDER
    for k in range(_EXPM_TAYLOR_ORDER - 1, 0, -1):
        result = eye + (a @ result) / k
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            result = result @ result
    if not np.isfinite(result).all():
        raise NonFinite("matrix exponential overflowed")
    return result


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    max_abs_residual: float


def loglog_fit(points) -> FitResult:
    """Least-squares line through (log x, log y); the slope estimates the
    convergence order of a power-law relationship.

    Requires at least two points with strictly positive coordinates.
    """
    pts = list(points)
    if len(pts) < 2:
        raise InsufficientPoints(f"log-log fit needs >= 2 points, got {len(pts)}")
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    if (xs <= 0).any() or (ys <= 0).any():
        raise NonPositiveValue("log-log fit requires strictly positive coordinates")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    residuals = ly - (slope * lx + intercept)
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        max_abs_residual=float(np.abs(residuals).max()),
    )


@dataclass(frozen=True)
class RngStream:
    """Deterministic random source keyed by (seed, stream_index).

    Backed by the Philox 4x64 counter-based bit generator with key
    ``[seed, stream_index]``; uniform doubles come straight off the bit
    stream, so identical keys reproduce identical sequences on every
    platform. Streams are values: drawing does not mutate the stream, and
    every call with the same arguments returns the same numbers. Derive
    fresh randomness by moving to another stream_index.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_index"):
            v = getattr(self, name)
            if not (0 <= v < 2 ** 64):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v}")

    def _generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, offset: int) -> "RngStream":
        return RngStream(self.seed, self.stream_index + offset)

    def uniform_symmetric(self, half_width: float, n: int) -> np.ndarray:
        """n values uniform in [-half_width, +half_width)."""
        if half_width <= 0:
            raise ValueError(f"half_width must be positive, got {half_width}")
        return (2.0 * self._generator().random(n) - 1.0) * half_width

    def uniform_matrix(self, half_width: float, rows: int, cols: int) -> np.ndarray:
        return self.uniform_symmetric(half_width, rows * cols).reshape(rows, cols)


def rng_uniform_symmetric(stream: RngStream, half_width: float, n: int) -> np.ndarray:
    return stream.uniform_symmetric(half_width, n)


def is_symmetric(a, rel_tol: float = 1e-12) -> bool:
    a = _as_square(a)
    scale = fro(a)
    return fro(a - a.T) <= rel_tol * (scale if scale > 0 else 1.0)


def is_positive_definite(a) -> bool:
    """Cholesky-based test; symmetric part is factored, so near-symmetric
    inputs from congruence round-off are accepted."""
    a = _as_square(a)
    try:
        np.linalg.cholesky(0.5 * (a + a.T))
    except np.linalg.LinAlgError:
        return False
    return True
