"""Lagrange interpolation at the zeros of ``p_{n+1}``."""

from __future__ import annotations

import numpy as np

from .gauss_jacobi import QuadratureRule, build_rule
from .jacobi_core import JacobiParams, normalized_table
from .mz_inequalities import WindowError, p_window
from .profiles import NormProfile
from .projection import SampledFunction, approximation_error
from .weighted_norms import VectorCoefficients, check_exponent


def barycentric_weights(nodes) -> np.ndarray:
    """``1 / prod_{k != j} (t_j - t_k)``, rescaled so the largest magnitude is 1.

    Products are accumulated as sums of logarithms; the raw products under-
    or overflow once there are more than a few dozen nodes.
    """
    x = np.asarray(nodes, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    log_mag = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    return sign * np.exp(log_mag - log_mag.max())


def _basis_matrix(rule: QuadratureRule, t) -> np.ndarray:
    """``L[i, j] = l_j(t_i)`` in the second barycentric form."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = barycentric_weights(rule.nodes)
    diff = t[:, None] - rule.nodes[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w / diff
        out = terms / terms.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    out[hit] = exact[hit].astype(float)
    return out


def lagrange_basis(rule: QuadratureRule, j: int, t):
    """``l_j(t)`` for the 1-based node index ``j`` (nodes in decreasing order)."""
    if not 1 <= j <= rule.size:
        raise ValueError(f"node index must lie in [1, {rule.size}], got {j}")
    values = _basis_matrix(rule, t)[:, j - 1]
    return values.reshape(np.shape(t)) if np.ndim(t) else float(values[0])


def node_values(rule: QuadratureRule, f: SampledFunction) -> np.ndarray:
    vals = f.rows(rule.nodes)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function must be finite at every node")
    return vals


def interpolate(rule: QuadratureRule, f: SampledFunction, model=None) -> VectorCoefficients:
    """Coefficients of ``I_n f``: ``c_k = sum_j lambda_j f(t_j) p_k(t_j)``.

    Gaussian quadrature is exact on ``I_n f * p_k``, so this discrete
    transform reproduces the interpolant exactly.
    """
    vals = node_values(rule, f)
    table = normalized_table(rule.params, rule.n, rule.nodes)
    coeffs = VectorCoefficients(table.T @ (rule.weights[:, None] * vals))
    if model is not None and model.dim != coeffs.dim:
        raise ValueError("model dimension does not match the function values")
    return coeffs


def interpolate_values(rule: QuadratureRule, f: SampledFunction, t) -> np.ndarray:
    """``I_n f(t)`` straight from the barycentric formula."""
    return _basis_matrix(rule, t) @ node_values(rule, f)


def check_interpolation_window(params: JacobiParams, p: float) -> None:
    window = p_window(params)
    if p >= window.M:
        raise WindowError(f"interpolation convergence is only claimed for p < M = {window.M:g}, got p = {p:g}")


def interpolation_error_profile(params: JacobiParams, p, f: SampledFunction, n_list, model=None) -> NormProfile:
    """``||f - I_n f||_{p; alpha, beta}`` along ``n``; needs ``p < M``."""
    p = check_exponent(p)
    check_interpolation_window(params, p)
    values = []
    for n in n_list:
        approx = interpolate(build_rule(params, n), f, model)
        values.append(approximation_error(params, p, f, approx, model))
    return NormProfile(tuple(n_list), tuple(values), f"interpolation error, p={p:g}")


def equispaced_interpolation_error(f: SampledFunction, n: int, grid_size: int = 2001) -> float:
    """Max error of degree-``n`` interpolation at equispaced points (for comparison)."""
    x = np.linspace(-1.0, 1.0, n + 1)
    t = np.linspace(-1.0, 1.0, grid_size)
    w = barycentric_weights(x)
    diff = t[:, None] - x[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w / diff
        basis = terms / terms.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    basis[hit] = exact[hit].astype(float)
    return float(np.max(np.abs(basis @ f(x) - f(t))))


def max_interpolation_error(rule: QuadratureRule, f: SampledFunction, grid_size: int = 2001) -> float:
    t = np.linspace(-1.0, 1.0, grid_size)
    return float(np.max(np.abs(interpolate_values(rule, f, t)[:, 0] - f(t))))
