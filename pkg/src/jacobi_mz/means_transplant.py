"""Weighted means of ultraspherical expansions and their transplantation.

The same coefficient table is expanded in two ultraspherical families and the
weighted L_p means of the two sums are compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jacobi_core import JacobiParams, normalized_table
from .mz_inequalities import WindowError, random_polynomial, trial_rng
from .profiles import NormProfile
from .weighted_norms import VectorCoefficients, VectorSpaceModel, check_exponent, continuous_lp_norm


def mean_weight_exponent(alpha: float, gamma: float, p: float) -> float:
    return (alpha + gamma) * p / 2.0


def jacobi_mean(alpha: float, gamma: float, p, coeffs: VectorCoefficients, model: VectorSpaceModel | None = None) -> float:
    """``(int ||sum_j p_j^(alpha,alpha)(t) x_j||^p (1-t^2)^((alpha+gamma)p/2) dt)^(1/p)``."""
    p = check_exponent(p)
    if math.isinf(p):
        raise ValueError("means are defined for finite p")
    e = mean_weight_exponent(alpha, gamma, p)
    if e <= -1.0:
        raise ValueError(f"weight exponent (alpha+gamma)p/2 = {e:g} is not integrable")
    return continuous_lp_norm(JacobiParams(alpha, alpha), p, coeffs, model, weight=JacobiParams(e, e))


def transplant_window(gamma: float, p: float) -> bool:
    return abs(gamma / 2.0 + 1.0 / p - 0.5) < 0.25


def transplant_ratio(alpha, beta, gamma, p, coeffs: VectorCoefficients, model=None) -> float:
    """Mean in the ``alpha`` family over the mean in the ``beta`` family."""
    p = check_exponent(p)
    if not transplant_window(gamma, p):
        raise WindowError(f"|gamma/2 + 1/p - 1/2| must be < 1/4 (gamma={gamma:g}, p={p:g})")
    top = jacobi_mean(alpha, gamma, p, coeffs, model)
    bottom = jacobi_mean(beta, gamma, p, coeffs, model)
    if bottom == 0.0:
        raise ValueError("the coefficient table is zero")
    return top / bottom


@dataclass(frozen=True)
class TransplantBand:
    n: int
    min_ratio: float
    max_ratio: float

    @property
    def spread(self) -> float:
        """Smallest ``M`` with every ratio in ``[1/M, M]``."""
        return max(self.max_ratio, 1.0 / self.min_ratio)


def transplant_bands(alpha, beta, gamma, p, n_list, tables: int = 100, seed: int = 0, model=None) -> list[TransplantBand]:
    """Ratio bands over random coefficient tables (same ensemble as the MZ experiments)."""
    dim = 1 if model is None else model.dim
    out = []
    for n in n_list:
        ratios = [
            transplant_ratio(alpha, beta, gamma, p, random_polynomial(trial_rng(seed, n, k), n, dim), model)
            for k in range(tables)
        ]
        out.append(TransplantBand(int(n), float(min(ratios)), float(max(ratios))))
    return out


def band_profile(bands: list[TransplantBand]) -> NormProfile:
    return NormProfile(tuple(b.n for b in bands), tuple(b.spread for b in bands), "transplant band")


def psi_values(alpha: float, poly: VectorCoefficients, s) -> np.ndarray:
    """``(sin s)^(alpha + 1/2) g(cos s)`` for ``g`` expanded in the ``(alpha, alpha)`` basis."""
    s = np.asarray(s, dtype=float)
    g = poly.evaluate(JacobiParams(alpha, alpha), np.cos(s))
    return np.sin(s)[:, None] ** (alpha + 0.5) * g


def transplant_kernel(alpha: float, beta: float, n: int, t, s) -> np.ndarray:
    """``sum_{j<=n} q_j^(alpha)(t) q_j^(beta)(s)`` with ``q_j^(a)(s) = (sin s)^(a+1/2) p_j^(a,a)(cos s)``."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    qa = normalized_table(JacobiParams(alpha, alpha), n, np.cos(t)) * np.sin(t)[:, None] ** (alpha + 0.5)
    qb = normalized_table(JacobiParams(beta, beta), n, np.cos(s)) * np.sin(s)[:, None] ** (beta + 0.5)
    return np.sum(qa * qb, axis=1)


def kernel_grid(size: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """All off-diagonal pairs of a uniform grid strictly inside ``(0, pi)``."""
    x = np.linspace(0.0, np.pi, size + 2)[1:-1]
    t, s = np.meshgrid(x, x, indexing="ij")
    off = t != s
    return t[off], s[off]


def transplant_kernel_bound(alpha: float, beta: float, n: int, grid=None) -> float:
    """Empirical ``sup |K_n(t, s)| |t - s|`` over the ``(t, s)`` pairs in ``grid``."""
    t, s = kernel_grid() if grid is None else (np.asarray(grid[0], float), np.asarray(grid[1], float))
    if np.any(t == s):
        raise ValueError("kernel grid pairs must have t != s")
    if np.any((t <= 0) | (t >= np.pi) | (s <= 0) | (s >= np.pi)):
        raise ValueError("kernel grid must lie in (0, pi)^2")
    return float(np.max(np.abs(transplant_kernel(alpha, beta, n, t, s)) * np.abs(t - s)))
