"""Weighted L_p norms and discrete Marcinkiewicz-Zygmund sums.

Polynomials are stored by their coefficients in the orthonormal Jacobi basis;
each coefficient is a vector in a finite-dimensional ``l_q^d`` model space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numpy.polynomial import chebyshev

from .gauss_jacobi import (
    QuadratureRule,
    RefinementError,
    build_rule,
    composite_rule,
    refinement_schedule,
)
from .jacobi_core import MAX_DEGREE, JacobiParams, normalized_table

REFINEMENT_RTOL = 1e-8
#: Geometric panel levels toward a singular endpoint; deeper grading puts
#: high-order nodes within rounding distance of the endpoint.
SINGULAR_GRADING = 30
#: Imaginary parts below this make a complex root worth a panel break.
_NEAR_REAL = 1e-2


def check_exponent(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"exponent p must satisfy 1 <= p <= inf, got {p!r}")
    return p


@dataclass(frozen=True)
class VectorSpaceModel:
    """The space ``l_q^d`` standing in for a Banach space of coefficients."""

    q: float = 2.0
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "q", check_exponent(self.q))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def is_hilbert(self) -> bool:
        return self.dim == 1 or self.q == 2.0

    def norm(self, values) -> np.ndarray:
        """Norms of the rows of ``values`` (shape ``(N, dim)``, or ``(N,)`` for dim 1)."""
        v = np.abs(np.asarray(values, dtype=float))
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[-1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}, got {v.shape[-1]}")
        if self.dim == 1:
            return v[..., 0]
        if math.isinf(self.q):
            return v.max(axis=-1)
        if self.q == 1.0:
            return v.sum(axis=-1)
        if self.q == 2.0:
            return np.sqrt(np.sum(v * v, axis=-1))
        # rescale by the largest entry to avoid overflow in v**q
        top = v.max(axis=-1, keepdims=True)
        safe = np.where(top > 0, top, 1.0)
        return top[..., 0] * np.sum((v / safe) ** self.q, axis=-1) ** (1.0 / self.q)


SCALAR = VectorSpaceModel(2.0, 1)


@dataclass(frozen=True, eq=False)
class VectorCoefficients:
    """Coefficient vectors ``x_0 .. x_n`` of ``sum_k p_k(t) x_k``; shape ``(n+1, d)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[0] == 0 or c.shape[1] == 0:
            raise ValueError("coefficients must form a nonempty (n+1, d) table")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, n: int, k: int, dim: int = 1) -> "VectorCoefficients":
        """The polynomial ``p_k`` (times the first unit vector) padded to degree ``n``."""
        c = np.zeros((max(n, k) + 1, dim))
        c[k, 0] = 1.0
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    def scaled(self, s: float) -> "VectorCoefficients":
        return VectorCoefficients(s * self.coeffs)

    def evaluate(self, params: JacobiParams, t) -> np.ndarray:
        """Values at ``t`` as an array of shape ``(len(t), d)``."""
        return normalized_table(params, self.degree, t) @ self.coeffs

    def sq_coefficient_norms(self, model: VectorSpaceModel) -> np.ndarray:
        return model.norm(self.coeffs) ** 2


def _resolve_model(poly: VectorCoefficients, model: VectorSpaceModel | None) -> VectorSpaceModel:
    if model is None:
        return VectorSpaceModel(2.0, poly.dim)
    if model.dim != poly.dim:
        raise ValueError(f"model dimension {model.dim} does not match coefficients ({poly.dim})")
    return model


def _is_even_integer(p: float) -> bool:
    return math.isfinite(p) and p == round(p) and int(round(p)) % 2 == 0


def real_roots(params: JacobiParams, coeffs, tol: float = _NEAR_REAL) -> np.ndarray:
    """Real parts of the roots of a scalar series lying in (-1, 1).

    Complex roots within ``tol`` of the real axis are kept too; they mark
    places where ``|q|`` bends sharply.
    """
    c = np.asarray(coeffs, dtype=float)
    n = len(c) - 1
    if n < 1 or not np.any(c[1:]):
        return np.empty(0)
    cheb = chebyshev.chebinterpolate(lambda x: normalized_table(params, n, x) @ c, n)
    cheb = chebyshev.chebtrim(cheb, tol=1e-14 * np.max(np.abs(cheb)))
    if len(cheb) < 2:
        return np.empty(0)
    roots = chebyshev.chebroots(cheb)
    keep = (np.abs(roots.imag) <= tol) & (np.abs(roots.real) < 1.0)
    return np.unique(roots.real[keep])


def kink_points(params: JacobiParams, poly: VectorCoefficients, model: VectorSpaceModel) -> np.ndarray:
    """Points where ``t -> ||q(t)||`` may fail to be smooth."""
    c = poly.coeffs
    found = [real_roots(params, c[:, i]) for i in range(poly.dim)]
    if poly.dim > 1 and math.isinf(model.q):
        for i, k in combinations(range(poly.dim), 2):
            found.append(real_roots(params, c[:, i] - c[:, k]))
            found.append(real_roots(params, c[:, i] + c[:, k]))
    return np.unique(np.concatenate(found)) if found else np.empty(0)


def _sup_scan(params: JacobiParams, poly: VectorCoefficients, model: VectorSpaceModel) -> float:
    size = max(1000, 20 * poly.degree)
    t = np.cos(np.linspace(0.0, np.pi, size))
    return float(np.max(model.norm(poly.evaluate(params, t))))


def _refine(integrand, weight: JacobiParams, breakpoints, grading, rtol, atol, start, what):
    """Double the panel order until two successive integrals agree."""
    values = []
    for m in refinement_schedule(start, cap=512):
        t, w = composite_rule(weight, m, breakpoints, grading)
        values.append(float(np.dot(w, integrand(t))))
        if len(values) > 1 and abs(values[-1] - values[-2]) <= rtol * abs(values[-1]) + atol:
            return values[-1]
    previous = values[-2] if len(values) > 1 else math.nan
    raise RefinementError(f"{what} did not settle", previous, values[-1])


def continuous_lp_norm(
    params: JacobiParams,
    p,
    poly: VectorCoefficients,
    model: VectorSpaceModel | None = None,
    weight: JacobiParams | None = None,
    rtol: float = REFINEMENT_RTOL,
) -> float:
    """``(int ||q(t)||^p w(t) dt)^(1/p)`` for ``q = sum_k p_k x_k``.

    The basis is orthonormal for ``params``; the integration weight defaults
    to the same Jacobi weight but can be any other one.
    """
    p = check_exponent(p)
    model = _resolve_model(poly, model)
    weight = params if weight is None else weight
    n = poly.degree
    if n > MAX_DEGREE:
        raise ValueError(f"degree {n} exceeds the supported maximum {MAX_DEGREE}")
    if math.isinf(p):
        return _sup_scan(params, poly, model)

    if _is_even_integer(p) and model.is_hilbert:
        size = int(p) * n // 2 + 1  # exact for degree 2*size - 1 > p*n
        if size <= MAX_DEGREE:
            rule = build_rule(weight, size - 1)
            vals = model.norm(poly.evaluate(params, rule.nodes))
            return float(np.dot(rule.weights, vals**p)) ** (1.0 / p)

    breaks = kink_points(params, poly, model)

    def integrand(t):
        return model.norm(poly.evaluate(params, t)) ** p

    panels = len(breaks) + 2
    start = max(8, 2 * (n + 1) // panels)
    total = _refine(integrand, weight, breaks, 0, rtol, 0.0, start, "weighted norm")
    return max(total, 0.0) ** (1.0 / p)


def discrete_mz_norm(rule: QuadratureRule, p, poly: VectorCoefficients, model: VectorSpaceModel | None = None) -> float:
    """``(sum_j lambda_j ||q(t_j)||^p)^(1/p)``, or ``max_j ||q(t_j)||`` for ``p = inf``."""
    p = check_exponent(p)
    model = _resolve_model(poly, model)
    vals = model.norm(poly.evaluate(rule.params, rule.nodes))
    if math.isinf(p):
        return float(np.max(vals))
    return float(np.dot(rule.weights, vals**p)) ** (1.0 / p)


def _as_rows(values, n_points: int) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim == 0:
        v = np.full(n_points, float(v))
    if v.shape[0] != n_points:
        raise ValueError("function returned the wrong number of values")
    return v


def sign_changes(func, grid_size: int = 4000, iterations: int = 52) -> np.ndarray:
    """Zeros of each component of ``func``: grid scan, then bisection on all brackets at once."""
    t = np.cos(np.linspace(np.pi, 0.0, grid_size))[1:-1]
    v = _as_rows(func(t), t.size)
    v = v[:, None] if v.ndim == 1 else v
    found = []
    for col in range(v.shape[1]):
        comp = v[:, col]
        idx = np.nonzero(np.sign(comp[:-1]) * np.sign(comp[1:]) < 0)[0]
        if idx.size == 0:
            continue
        lo, hi = t[idx].copy(), t[idx + 1].copy()
        sign_lo = np.sign(comp[idx])
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            vm = _as_rows(func(mid), mid.size)
            vm = vm[:, col] if vm.ndim == 2 else vm
            same = np.sign(vm) == sign_lo
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        found.append(0.5 * (lo + hi))
    return np.unique(np.concatenate(found)) if found else np.empty(0)


def unresolved_fraction(weight: JacobiParams, right: bool, left: bool) -> float:
    """Rough share of a weighted integral lying within rounding distance of a singular end.

    Points closer than machine epsilon to an endpoint cannot be represented,
    so ``eps^(1 + exponent)`` bounds the attainable relative accuracy there.
    """
    eps = np.finfo(float).eps
    share = 0.0
    if right:
        share = max(share, eps ** (1.0 + weight.alpha))
    if left:
        share = max(share, eps ** (1.0 + weight.beta))
    return 10.0 * share


def function_lp_norm(
    params: JacobiParams,
    p,
    func,
    model: VectorSpaceModel = SCALAR,
    breakpoints=(),
    endpoint_exponents=(0.0, 0.0),
    rtol: float = REFINEMENT_RTOL,
    atol: float = 0.0,
) -> float:
    """Weighted L_p norm of an arbitrary function ``func(t)``.

    ``endpoint_exponents = (a, b)`` declares ``||f(t)|| ~ (1-t)^a`` near 1 and
    ``(1+t)^b`` near -1.  Negative exponents are moved into the quadrature
    weight (and the panels are graded toward that end); if the resulting
    weight is not integrable the norm is infinite.  Unless ``p`` is an even
    integer, sign changes of the components are added to the breakpoints.
    Near a singular end the tolerance is relaxed to what double precision
    can resolve (see ``unresolved_fraction``).
    ``atol`` is an absolute tolerance on the p-th power, useful when the
    function is roundoff-sized.
    """
    p = check_exponent(p)
    a_sing, b_sing = (min(float(e), 0.0) for e in endpoint_exponents)

    if math.isinf(p):
        if a_sing < 0 or b_sing < 0:
            return math.inf
        t = np.cos(np.linspace(0.0, np.pi, 4001))[1:-1]
        return float(np.max(model.norm(_as_rows(func(t), t.size))))

    shift_a, shift_b = a_sing * p, b_sing * p
    if params.alpha + shift_a <= -1.0 or params.beta + shift_b <= -1.0:
        return math.inf
    weight = params.shifted(shift_a, shift_b)
    grading = (SINGULAR_GRADING if shift_b < 0 else 0, SINGULAR_GRADING if shift_a < 0 else 0)
    rtol = max(rtol, unresolved_fraction(weight, shift_a < 0, shift_b < 0))
    breaks = np.asarray(breakpoints, dtype=float)
    if not _is_even_integer(p):
        breaks = np.union1d(breaks, sign_changes(func))

    def integrand(t):
        vals = model.norm(_as_rows(func(t), t.size)) ** p
        if shift_a or shift_b:
            vals = vals * (1.0 - t) ** -shift_a * (1.0 + t) ** -shift_b
        return vals

    total = _refine(integrand, weight, breaks, grading, rtol, atol, 16, "function norm")
    return max(total, 0.0) ** (1.0 / p)
