"""Partial sums of Jacobi series and their convergence in weighted L_p."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gauss_jacobi import RefinementError, composite_rule, refinement_schedule
from .jacobi_core import MAX_DEGREE, JacobiParams, normalized_table, recurrence_coefficients
from .profiles import NormProfile
from .weighted_norms import (
    SCALAR,
    SINGULAR_GRADING,
    VectorCoefficients,
    VectorSpaceModel,
    check_exponent,
    continuous_lp_norm,
    function_lp_norm,
)

SMOOTHNESS_TAGS = ("smooth", "endpoint-singular", "interior-kink")
MAX_PROJECTION_DEGREE = 150
COEFFICIENT_RTOL = 1e-8
KERNEL_NEAR_DIAGONAL = 1e-6


@dataclass(frozen=True)
class SampledFunction:
    """A function on (-1, 1) with hints for the quadrature.

    ``breakpoints`` lists interior points where the function is not smooth;
    ``endpoint_exponents = (a, b)`` says it behaves like ``(1-t)^a`` near 1
    and ``(1+t)^b`` near -1 (only negative values matter).
    """

    evaluator: object
    tag: str = "smooth"
    breakpoints: tuple = ()
    endpoint_exponents: tuple = (0.0, 0.0)
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.tag not in SMOOTHNESS_TAGS:
            raise ValueError(f"tag must be one of {SMOOTHNESS_TAGS}, got {self.tag!r}")
        object.__setattr__(self, "breakpoints", tuple(float(x) for x in self.breakpoints))
        object.__setattr__(self, "endpoint_exponents", tuple(float(x) for x in self.endpoint_exponents))

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        v = np.asarray(self.evaluator(t), dtype=float)
        if v.ndim == 0:
            v = np.full(t.shape, float(v))
        return v

    def rows(self, t) -> np.ndarray:
        v = self(t)
        return v[:, None] if v.ndim == 1 else v

    @property
    def is_singular(self) -> bool:
        return min(self.endpoint_exponents) < 0.0


def named_function(name: str, s: float = 0.2) -> SampledFunction:
    """Test functions used by the experiments; ``s`` sets the endpoint blow-up."""
    table = {
        "exp": lambda: SampledFunction(np.exp, "smooth", name="exp"),
        "sign": lambda: SampledFunction(np.sign, "interior-kink", (0.0,), name="sign"),
        "abs": lambda: SampledFunction(np.abs, "interior-kink", (0.0,), name="abs"),
        "runge": lambda: SampledFunction(lambda t: 1.0 / (1.0 + 25.0 * t * t), "smooth", name="runge"),
        "right_power": lambda: SampledFunction(
            lambda t: (1.0 - t) ** -s, "endpoint-singular", (), (-s, 0.0), name=f"right_power({s:g})"
        ),
        "left_power": lambda: SampledFunction(
            lambda t: (1.0 + t) ** -s, "endpoint-singular", (), (0.0, -s), name=f"left_power({s:g})"
        ),
    }
    if name not in table:
        raise ValueError(f"unknown function {name!r}; choose from {sorted(table)}")
    return table[name]()


def polynomial_function(params: JacobiParams, poly: VectorCoefficients) -> SampledFunction:
    """View a coefficient table as a function."""
    def evaluator(t):
        v = poly.evaluate(params, np.atleast_1d(t))
        return v[:, 0] if poly.dim == 1 else v

    return SampledFunction(evaluator, "smooth", name="polynomial")


def _coefficients(params: JacobiParams, n: int, f: SampledFunction, m: int) -> np.ndarray:
    sa, sb = (min(e, 0.0) for e in f.endpoint_exponents)
    weight = params.shifted(sa, sb)
    grading = (SINGULAR_GRADING if sb < 0 else 0, SINGULAR_GRADING if sa < 0 else 0)
    t, w = composite_rule(weight, m, f.breakpoints, grading)
    vals = f.rows(t)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function is not finite at a quadrature node")
    if sa or sb:
        w = w * (1.0 - t) ** -sa * (1.0 + t) ** -sb
    return normalized_table(params, n, t).T @ (w[:, None] * vals)


def project(params: JacobiParams, n: int, f: SampledFunction, model: VectorSpaceModel | None = None) -> VectorCoefficients:
    """Coefficients ``<f, p_j>`` for ``j = 0..n``, refined until they stop moving.

    The first rule has ``2(n+1)`` nodes per panel; the panel order doubles
    until successive coefficient tables agree to ``1e-8`` relative to the
    largest coefficient.
    """
    n = int(n)
    if not 0 <= n <= MAX_PROJECTION_DEGREE:
        raise ValueError(f"projection degree must lie in [0, {MAX_PROJECTION_DEGREE}], got {n}")
    if min(f.endpoint_exponents) <= -1.0:
        raise ValueError("endpoint singularity is not integrable")
    sa, sb = (min(e, 0.0) for e in f.endpoint_exponents)
    if params.alpha + sa <= -1.0 or params.beta + sb <= -1.0:
        raise ValueError("f * p_j is not integrable against the weight")
    previous = None
    for m in refinement_schedule(2 * (n + 1), cap=MAX_DEGREE):
        coeffs = _coefficients(params, n, f, m)
        if previous is not None:
            scale = float(np.max(np.abs(coeffs)))
            if np.max(np.abs(coeffs - previous)) <= COEFFICIENT_RTOL * scale + 1e-300:
                out = VectorCoefficients(coeffs)
                if model is not None and model.dim != out.dim:
                    raise ValueError("model dimension does not match the function values")
                return out
        previous = coeffs
    raise RefinementError(
        "projection coefficients did not settle",
        float(np.max(np.abs(previous))),
        float(np.max(np.abs(coeffs))),
    )


def coefficients_to_csv(poly: VectorCoefficients, fh=None) -> str:
    from .profiles import rows_to_csv

    rows = [
        {"j": j, **{f"x{i}": float(x) for i, x in enumerate(row)}} for j, row in enumerate(poly.coeffs)
    ]
    return rows_to_csv(rows, fh)


def error_function(params: JacobiParams, f: SampledFunction, approx: VectorCoefficients):
    def err(t):
        t = np.atleast_1d(t)
        v = f.rows(t) - approx.evaluate(params, t)
        return v[:, 0] if v.shape[1] == 1 else v

    return err


def noise_floor(f: SampledFunction, p: float, params: JacobiParams) -> float:
    """Absolute tolerance for ``int |f - Q f|^p w`` at the level of roundoff in ``f``."""
    t = np.cos(np.linspace(0.0, np.pi, 257))[1:-1]
    scale = max(1.0, float(np.max(np.abs(f.rows(t)))))
    return (1e-13 * scale) ** p * params.mass


def approximation_error(params: JacobiParams, p, f: SampledFunction, approx: VectorCoefficients, model=None) -> float:
    """``||f - approx||_{p; alpha, beta}``."""
    p = check_exponent(p)
    model = VectorSpaceModel(2.0, approx.dim) if model is None else model
    atol = 0.0 if math.isinf(p) else noise_floor(f, p, params)
    return function_lp_norm(
        params,
        p,
        error_function(params, f, approx),
        model,
        breakpoints=f.breakpoints,
        endpoint_exponents=f.endpoint_exponents,
        atol=atol,
    )


def projection_error_profile(params: JacobiParams, p, f: SampledFunction, n_list, model=None) -> NormProfile:
    values = [approximation_error(params, p, f, project(params, n, f, model), model) for n in n_list]
    return NormProfile(tuple(n_list), tuple(values), f"projection error, p={float(p):g}")


def christoffel_darboux_kernel(params: JacobiParams, n: int, x, y):
    """``k_n(x, y) = sum_{j<=n} p_j(x) p_j(y)``, broadcast over ``x`` and ``y``.

    Off the diagonal the two-term Christoffel-Darboux quotient is used; within
    ``1e-6`` of it the sum is formed directly.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    tx = normalized_table(params, n + 1, x)
    ty = normalized_table(params, n + 1, y)
    summed = np.sum(tx[:, : n + 1] * ty[:, : n + 1], axis=1)
    a_next = recurrence_coefficients(params, n + 1)[1][n]
    diff = x - y
    far = np.abs(diff) > KERNEL_NEAR_DIAGONAL
    out = summed
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = a_next * (tx[:, n + 1] * ty[:, n] - tx[:, n] * ty[:, n + 1]) / diff
    out = np.where(far, quotient, summed)
    return out.reshape(shape) if shape else float(out[0])


def norm_product_profile(params: JacobiParams, p, n_list) -> NormProfile:
    """``||p_n||_p * ||p_n||_p'`` along ``n``; bounded exactly when ``m < p < M``."""
    p = check_exponent(p)
    if not 1.0 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    q = p / (p - 1.0)
    values = []
    for n in n_list:
        pn = VectorCoefficients.basis(n, n)
        values.append(continuous_lp_norm(params, p, pn, SCALAR) * continuous_lp_norm(params, q, pn, SCALAR))
    return NormProfile(tuple(n_list), tuple(values), f"norm product, p={p:g}")
