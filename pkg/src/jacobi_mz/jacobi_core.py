"""L2-normalized Jacobi polynomials on (-1, 1).

Values come from the classical three-term recurrence (Szego normalization)
rescaled by the exact norm, which is computed with log-gamma arithmetic.
All functions are vectorized over the evaluation points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Largest polynomial degree whose evaluation is certified by the test-suite.
MAX_DEGREE = 1024


@dataclass(frozen=True)
class JacobiParams:
    """Exponents of the weight ``(1 - t)**alpha * (1 + t)**beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= -1.0:
                raise ValueError(f"{name} must be a finite number > -1, got {value!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def is_ultraspherical(self) -> bool:
        return self.alpha == self.beta

    @property
    def mass(self) -> float:
        """Total mass of the weight, ``2**(a+b+1) B(a+1, b+1)``."""
        return math.exp(log_norm_sq(self.alpha, self.beta, 0))

    def shifted(self, da: float, db: float) -> "JacobiParams":
        return JacobiParams(self.alpha + da, self.beta + db)


@dataclass(frozen=True)
class NormalizedJacobiEvaluation:
    degree: int
    point: float
    value: float
    derivative: float


def weight(params: JacobiParams, t):
    """Evaluate ``(1 - t)**alpha (1 + t)**beta``.

    Raises ``ValueError`` when a point lies on or outside the boundary and the
    corresponding exponent is negative (the weight is infinite there).
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise ValueError("weight is only defined on [-1, 1]")
    if params.alpha < 0 and np.any(t >= 1.0):
        raise ValueError("weight is infinite at t = 1 for alpha < 0")
    if params.beta < 0 and np.any(t <= -1.0):
        raise ValueError("weight is infinite at t = -1 for beta < 0")
    out = (1.0 - t) ** params.alpha * (1.0 + t) ** params.beta
    return out if out.ndim else float(out)


def log_norm_sq(alpha: float, beta: float, n: int) -> float:
    """Log of the squared L2 norm of the classical Jacobi polynomial P_n."""
    ab = alpha + beta
    if n == 0:
        return (
            (ab + 1.0) * math.log(2.0)
            + math.lgamma(alpha + 1.0)
            + math.lgamma(beta + 1.0)
            - math.lgamma(ab + 2.0)
        )
    return (
        (ab + 1.0) * math.log(2.0)
        - math.log(2 * n + ab + 1.0)
        + math.lgamma(n + alpha + 1.0)
        + math.lgamma(n + beta + 1.0)
        - math.lgamma(n + ab + 1.0)
        - math.lgamma(n + 1.0)
    )


def _check_degree(n: int) -> int:
    n = int(n)
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds the supported maximum {MAX_DEGREE}")
    return n


def _points(t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~np.isfinite(t)):
        raise ValueError("evaluation points must be finite")
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise ValueError("evaluation points must lie in [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def classical_table(alpha: float, beta: float, n: int, t) -> np.ndarray:
    """Columns ``P_0 .. P_n`` of the classical Jacobi polynomials at ``t``.

    Uses the recurrence
    ``2k(k+a+b)(2k+a+b-2) P_k = (2k+a+b-1)((2k+a+b)(2k+a+b-2) t + a^2-b^2) P_{k-1}
    - 2(k+a-1)(k+b-1)(2k+a+b) P_{k-2}``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((t.size, n + 1))
    out[:, 0] = 1.0
    if n == 0:
        return out
    a, b = alpha, beta
    ab = a + b
    out[:, 1] = (a + 1.0) + (ab + 2.0) * (t - 1.0) / 2.0
    for k in range(2, n + 1):
        c = 2 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 1.0) * c * (c - 2.0)
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        out[:, k] = ((a2 + a3 * t) * out[:, k - 1] - a4 * out[:, k - 2]) / a1
    return out


def _inv_norms(alpha: float, beta: float, n: int) -> np.ndarray:
    return np.exp([-0.5 * log_norm_sq(alpha, beta, k) for k in range(n + 1)])


def normalized_table(params: JacobiParams, n: int, t) -> np.ndarray:
    """Matrix ``T[i, k] = p_k(t_i)`` for ``k = 0..n``."""
    n = _check_degree(n)
    t = _points(t)
    return classical_table(params.alpha, params.beta, n, t) * _inv_norms(
        params.alpha, params.beta, n
    )


def derivative_table(params: JacobiParams, n: int, t) -> np.ndarray:
    """Matrix ``D[i, k] = p_k'(t_i)`` via ``P_k' = (k+a+b+1)/2 P_{k-1}^{(a+1,b+1)}``."""
    n = _check_degree(n)
    t = _points(t)
    a, b = params.alpha, params.beta
    out = np.zeros((t.size, n + 1))
    if n == 0:
        return out
    shifted = classical_table(a + 1.0, b + 1.0, n - 1, t)
    k = np.arange(1, n + 1)
    out[:, 1:] = shifted * ((k + a + b + 1.0) / 2.0) * _inv_norms(a, b, n)[1:]
    return out


def jacobi_normalized(params: JacobiParams, n: int, t) -> np.ndarray:
    """Values of ``p_n`` at the points ``t`` (same shape as ``t``)."""
    shape = np.shape(t)
    return normalized_table(params, n, t)[:, -1].reshape(shape)


def jacobi_normalized_derivative(params: JacobiParams, n: int, t) -> np.ndarray:
    shape = np.shape(t)
    return derivative_table(params, n, t)[:, -1].reshape(shape)


def eval_normalized(params: JacobiParams, n: int, t: float) -> NormalizedJacobiEvaluation:
    """Value and first derivative of ``p_n`` at a single point."""
    value = float(jacobi_normalized(params, n, float(t)))
    deriv = float(jacobi_normalized_derivative(params, n, float(t)))
    return NormalizedJacobiEvaluation(int(n), float(t), value, deriv)


def recurrence_coefficients(params: JacobiParams, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of ``t p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1}``.

    Returns ``(b_0..b_{n-1}, a_1..a_n)``; the leading ``n x n`` block of the
    Jacobi matrix has ``b`` on the diagonal and ``a[:-1]`` off it.
    """
    a, bb = params.alpha, params.beta
    ab = a + bb
    diag = np.empty(n)
    for i in range(n):
        if i == 0:
            diag[i] = (bb - a) / (ab + 2.0)
        else:
            diag[i] = (bb * bb - a * a) / ((2 * i + ab) * (2 * i + ab + 2.0))
    off = np.empty(n)
    for i, j in enumerate(range(1, n + 1)):
        if j == 1:
            off[i] = math.sqrt(4.0 * (1 + a) * (1 + bb) / ((2 + ab) ** 2 * (3 + ab)))
        else:
            s = 2 * j + ab
            off[i] = math.sqrt(4.0 * j * (j + a) * (j + bb) * (j + ab) / (s * s * (s * s - 1.0)))
    return diag, off


def envelope(params: JacobiParams, n: int, t) -> np.ndarray:
    """``(1-t+n^-2)^-(a/2+1/4) (1+t+n^-2)^-(b/2+1/4)``."""
    t = np.asarray(t, dtype=float)
    eps = float(n) ** -2
    return (1.0 - t + eps) ** -(params.alpha / 2 + 0.25) * (1.0 + t + eps) ** -(
        params.beta / 2 + 0.25
    )


def envelope_bound_constant(params: JacobiParams, n_max: int, grid_size: int = 2001) -> float:
    """Smallest ``c`` with ``|p_n(t)| <= c * envelope(n, t)`` on a grid, ``1 <= n <= n_max``.

    The grid is the set of Chebyshev extreme points, so both endpoints are
    included.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    t = np.cos(np.linspace(0.0, np.pi, int(grid_size)))
    table = normalized_table(params, n_max, t)
    best = 0.0
    for n in range(1, n_max + 1):
        ratio = np.abs(table[:, n]) / envelope(params, n, t)
        best = max(best, float(ratio.max()))
    return best


def symmetry_defect(params: JacobiParams, n: int, grid=None) -> float:
    """``max |p_n(-x) - (-1)^n p_n(x)|`` over ``grid`` (ultraspherical only)."""
    if not params.is_ultraspherical:
        raise ValueError("the reflection identity p_n(-x) = (-1)^n p_n(x) needs alpha == beta")
    if grid is None:
        grid = np.linspace(-1.0, 1.0, 101)
    grid = np.asarray(grid, dtype=float)
    left = jacobi_normalized(params, n, -grid)
    right = (-1) ** n * jacobi_normalized(params, n, grid)
    return float(np.max(np.abs(left - right)))
