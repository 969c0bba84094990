"""Marcinkiewicz-Zygmund inequalities at Jacobi nodes, checked numerically.

The left inequality bounds the discrete sum by the continuous norm; the
right one goes the other way and holds only for ``p`` inside a window
``(mu, M)`` that depends on the weight exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .gauss_jacobi import build_rule
from .jacobi_core import JacobiParams, normalized_table
from .profiles import NormProfile
from .weighted_norms import (
    VectorCoefficients,
    VectorSpaceModel,
    check_exponent,
    continuous_lp_norm,
    discrete_mz_norm,
)

SEED_SCHEME = "numpy SeedSequence(entropy=seed, spawn_key=(n, trial))"
ENSEMBLE = "iid uniform[-1, 1] coefficients in the orthonormal basis"
EXTREMALS = ("jacobi_poly", "first_lagrange")
MIN_TRIALS = 50


class WindowError(ValueError):
    """An exponent lies outside the range where a result is claimed."""


@dataclass(frozen=True)
class PWindow:
    """Exponent thresholds: the right inequality holds for ``mu < p < M``."""

    mu: float
    m: float
    M: float

    def contains(self, p: float) -> bool:
        return self.mu < p < self.M

    def right_window_for(self, extremal: str) -> tuple[float, float]:
        """The part of the window tested by an extremal polynomial."""
        if extremal == "jacobi_poly":
            return (1.0, self.M)
        if extremal == "first_lagrange":
            return (self.mu, math.inf)
        raise ValueError(f"unknown extremal {extremal!r}; expected one of {EXTREMALS}")


def p_window(params: JacobiParams) -> PWindow:
    a, b = params.alpha, params.beta
    mu = max(1.0, 4 * (a + 1) / (2 * a + 5), 4 * (b + 1) / (2 * b + 5))
    x = max(a, b)  # 4(x+1)/(2x+3) increases with x
    m = max(1.0, 4 * (x + 1) / (2 * x + 3))
    # conjugate of m, written in closed form to avoid the rounding in m/(m-1)
    M = math.inf if m == 1.0 else 4 * (x + 1) / (2 * x + 1)
    return PWindow(mu, m, M)


def trial_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    """Generator for one ``(n, trial)`` cell, independent of evaluation order."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(n), int(trial))))


def random_polynomial(rng: np.random.Generator, degree: int, dim: int = 1) -> VectorCoefficients:
    return VectorCoefficients(rng.uniform(-1.0, 1.0, size=(degree + 1, dim)))


def _degree_for(n: int, degree) -> int:
    if degree == "2n":
        return 2 * n
    if degree == "n":
        return n
    d = int(degree)
    if d < 0:
        raise ValueError("degree must be nonnegative")
    return d


def left_ratio(params: JacobiParams, p, n: int, poly: VectorCoefficients, model=None) -> float:
    """Discrete sum over the ``(n+1)``-point rule divided by the continuous norm."""
    rule = build_rule(params, n)
    return discrete_mz_norm(rule, p, poly, model) / continuous_lp_norm(params, p, poly, model)


def left_constant_profile(
    params: JacobiParams,
    p,
    n_list,
    trials: int = MIN_TRIALS,
    model: VectorSpaceModel | None = None,
    seed: int = 0,
    degree="2n",
    executor=None,
) -> NormProfile:
    """Per-``n`` maximum of the left ratio over a random polynomial ensemble.

    ``degree`` is ``"2n"`` (the largest degree the inequality covers), ``"n"``
    or a fixed integer.  ``executor`` may be any ``concurrent.futures``
    executor; results do not depend on scheduling.
    """
    p = check_exponent(p)
    if trials < MIN_TRIALS:
        raise ValueError(f"at least {MIN_TRIALS} trials are required, got {trials}")
    dim = 1 if model is None else model.dim

    def cell(n, trial):
        poly = random_polynomial(trial_rng(seed, n, trial), _degree_for(n, degree), dim)
        return left_ratio(params, p, n, poly, model)

    cells = [(n, k) for n in n_list for k in range(trials)]
    if executor is None:
        ratios = [cell(n, k) for n, k in cells]
    else:
        ratios = list(executor.map(lambda nk: cell(*nk), cells))
    table = np.asarray(ratios).reshape(len(n_list), trials)
    return NormProfile(tuple(n_list), tuple(table.max(axis=1)), f"left ratio, p={p:g}")


def extremal_polynomial(params: JacobiParams, n: int, extremal: str) -> VectorCoefficients:
    """``p_n`` itself, or the Lagrange function of the largest node."""
    if extremal == "jacobi_poly":
        return VectorCoefficients.basis(n, n)
    if extremal == "first_lagrange":
        rule = build_rule(params, n)
        t1, lam1 = rule.nodes[:1], rule.weights[0]
        return VectorCoefficients(lam1 * normalized_table(params, n, t1)[0])
    raise ValueError(f"unknown extremal {extremal!r}; expected one of {EXTREMALS}")


def right_ratio(params: JacobiParams, p, n: int, poly: VectorCoefficients, model=None) -> float:
    """Continuous norm divided by the discrete sum over the ``(n+1)``-point rule."""
    rule = build_rule(params, n)
    return continuous_lp_norm(params, p, poly, model) / discrete_mz_norm(rule, p, poly, model)


def right_extremal_profile(params: JacobiParams, p, n_list, extremal: str = "jacobi_poly") -> NormProfile:
    p = check_exponent(p)
    if math.isinf(p):
        raise ValueError("the right-inequality profile needs a finite p")
    values = [right_ratio(params, p, n, extremal_polynomial(params, n, extremal)) for n in n_list]
    return NormProfile(tuple(n_list), tuple(values), f"right ratio, {extremal}, p={p:g}")


def _log_abs_expm1(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x > 0
    out[pos] = x[pos] + np.log(-np.expm1(-x[pos]))
    out[~pos] = np.log(-np.expm1(x[~pos]))
    return out


def _kernel_integrand(s, b: float, p: float):
    """Integrand after substituting ``t = +-exp(s)``; both signs of ``t`` summed."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros_like(s)
    nz = s != 0.0
    if b == 0.0:
        return out
    sn = s[nz]
    base = _log_abs_expm1(-b * sn) + sn * (1.0 - 1.0 / p)
    with np.errstate(over="ignore"):
        positive = np.exp(base - _log_abs_expm1(sn))
        negative = np.exp(base - np.logaddexp(sn, 0.0))
    out[nz] = positive + negative
    return out


KERNEL_INTEGRAL_START = 8.0
KERNEL_INTEGRAL_MAX_CUTOFF = 2.0**13
KERNEL_INTEGRAL_RTOL = 1e-7


def kernel_integral(b: float, p: float) -> float:
    """``int_R ||t|^-b - 1| |t|^(-1/p) / |t - 1| dt``, or ``inf`` when it diverges.

    Works in the variable ``s = log|t|`` and doubles the cutoff ``|s| <= L``
    until the added tail is negligible.  A tail that keeps contributing up
    to ``L = 2^13`` (decay rate below roughly 5e-3) is reported as infinite.
    """
    p = float(p)
    if not 1.0 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    b = float(b)
    if b == 0.0:
        return 0.0

    def piece(lo, hi):
        val, _ = quad(lambda s: _kernel_integrand(s, b, p)[0], lo, hi, limit=200, epsabs=0.0, epsrel=1e-10)
        return val

    L = KERNEL_INTEGRAL_START
    total = piece(-L, 0.0) + piece(0.0, L)
    while L < KERNEL_INTEGRAL_MAX_CUTOFF:
        added = piece(-2 * L, -L) + piece(L, 2 * L)
        L *= 2
        if not math.isfinite(added):
            return math.inf
        total += added
        if added <= KERNEL_INTEGRAL_RTOL * total:
            return total
    return math.inf


def kernel_integral_window(b: float, p: float) -> bool:
    """Finiteness condition ``-1/p < b < 1 - 1/p``."""
    return -1.0 / p < b < 1.0 - 1.0 / p
