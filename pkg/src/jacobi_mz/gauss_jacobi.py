"""Gauss-Jacobi quadrature.

Nodes are the zeros of ``p_{n+1}``, found by a simultaneous Newton iteration
seeded with the asymptotic cosine spacing of the zeros.  Weights come from the
Christoffel function ``1 / sum_k p_k(t_j)^2``; the Golub-Welsch eigenvalue
method is kept alongside as an independent cross-check.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .jacobi_core import (
    MAX_DEGREE,
    JacobiParams,
    classical_table,
    derivative_table,
    normalized_table,
    recurrence_coefficients,
)
from .profiles import ExperimentReport

NEWTON_MAX_ITER = 100


class ConvergenceError(RuntimeError):
    """Raised when the node iteration does not settle."""


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """``n + 1`` Gauss-Jacobi nodes (decreasing) and their positive weights."""

    params: JacobiParams
    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.n + 1

    def integrate(self, f):
        return integrate(self, f)

    def to_csv(self, fh=None) -> str:
        """Write ``j, t_j, lambda_j`` rows (1-based ``j``); returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "t_j", "lambda_j"])
        for j, (t, lam) in enumerate(zip(self.nodes, self.weights), start=1):
            writer.writerow([j, f"{t:.17g}", f"{lam:.17g}"])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def _seed_angles(params: JacobiParams, size: int) -> np.ndarray:
    # theta_i ~ (i + alpha/2 - 1/4) pi / (N + (alpha+beta+1)/2), i = 1..N
    i = np.arange(1, size + 1, dtype=float)
    a, b = params.alpha, params.beta
    return (i + a / 2.0 - 0.25) * np.pi / (size + (a + b + 1.0) / 2.0)


def _newton_ratio(params: JacobiParams, size: int, x: np.ndarray):
    """``P_N(x) / P_N'(x)`` in the classical normalization, plus ``P_N`` and ``P_N'``."""
    a, b = params.alpha, params.beta
    val = classical_table(a, b, size, x)[:, -1]
    der = classical_table(a + 1.0, b + 1.0, size - 1, x)[:, -1] * (size + a + b + 1.0) / 2.0
    return val / der, val, der


def find_nodes(params: JacobiParams, n: int) -> np.ndarray:
    """Zeros ``t_1 > ... > t_{n+1}`` of ``p_{n+1}``.

    Aberth-Ehrlich correction keeps the simultaneous Newton iterates from
    collapsing onto the same zero.
    """
    size = n + 1
    x = np.cos(_seed_angles(params, size))
    if size == 1:
        a, b = params.alpha, params.beta
        return np.array([(b - a) / (a + b + 2.0)])
    for _ in range(NEWTON_MAX_ITER):
        ratio, _, _ = _newton_ratio(params, size, x)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = np.sum(1.0 / diff, axis=1)
        step = ratio / (1.0 - ratio * repulsion)
        x = x - step
        if np.max(np.abs(step)) <= 4e-16:
            break
    else:
        raise ConvergenceError(
            f"node iteration did not settle in {NEWTON_MAX_ITER} steps "
            f"(alpha={params.alpha}, beta={params.beta}, n={n})"
        )
    # two plain Newton polishing steps
    for _ in range(2):
        ratio, _, _ = _newton_ratio(params, size, x)
        x = x - ratio
    x = np.sort(x)[::-1]
    if not (np.all(np.abs(x) < 1.0) and np.all(np.diff(x) < 0)):
        raise ConvergenceError("node iteration produced invalid or coincident zeros")
    return x


def christoffel_weights(params: JacobiParams, nodes: np.ndarray) -> np.ndarray:
    """``lambda_j = 1 / sum_{k<=n} p_k(t_j)^2``."""
    table = normalized_table(params, nodes.size - 1, nodes)
    return 1.0 / np.einsum("ij,ij->i", table, table)


def golub_welsch(params: JacobiParams, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (decreasing) and weights from the eigen-decomposition of the Jacobi matrix."""
    size = n + 1
    diag, off = recurrence_coefficients(params, size)
    if size == 1:
        return diag.copy(), np.array([params.mass])
    vals, vecs = eigh_tridiagonal(diag, off[:-1])
    weights = params.mass * vecs[0, :] ** 2
    return vals[::-1].copy(), weights[::-1].copy()


@functools.lru_cache(maxsize=512)
def _cached_rule(alpha: float, beta: float, n: int) -> QuadratureRule:
    params = JacobiParams(alpha, beta)
    nodes = find_nodes(params, n)
    weights = christoffel_weights(params, nodes)
    _check_residual(params, n, nodes)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(params, n, nodes, weights)


def _check_residual(params: JacobiParams, n: int, nodes: np.ndarray) -> None:
    table = normalized_table(params, n + 1, nodes)
    resid = np.abs(table[:, -1])
    deriv = np.abs(derivative_table(params, n + 1, nodes)[:, -1])
    scale = np.maximum(np.max(np.abs(table[:, -1])), 1.0)
    # residual at a double-precision zero is bounded by |p'| * ulp(t)
    bound = 1e-13 * scale + 8 * np.finfo(float).eps * deriv
    if np.any(resid > bound):
        raise ConvergenceError("node residual above tolerance after polishing")


def build_rule(params: JacobiParams, n: int) -> QuadratureRule:
    """Gauss-Jacobi rule with ``n + 1`` nodes, exact for degree ``<= 2n + 1``."""
    n = int(n)
    if n < 0 or n >= MAX_DEGREE:
        raise ValueError(f"rule size parameter n must lie in [0, {MAX_DEGREE - 1}], got {n}")
    return _cached_rule(params.alpha, params.beta, n)


def integrate(rule: QuadratureRule, f):
    """``sum_j lambda_j f(t_j)``; ``f`` is called once on the node array.

    Vector-valued ``f`` (returning shape ``(n+1, d)``) gives a length-``d`` result.
    """
    values = np.asarray(f(rule.nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("integrand is not finite at every node")
    if values.ndim == 0:
        values = np.full(rule.size, float(values))
    out = np.tensordot(rule.weights, values, axes=(0, 0))
    return float(out) if np.ndim(out) == 0 else out


def jacobi_moments(params: JacobiParams, kmax: int) -> np.ndarray:
    """``m_k = int t^k w(t) dt`` for ``k = 0..kmax``.

    ``m_0`` is the Beta-function mass; integrating
    ``d/dt [(1-t)^(a+1) (1+t)^(b+1) t^k]`` gives
    ``(k+a+b+2) m_{k+1} = (b-a) m_k + k m_{k-1}``.
    """
    a, b = params.alpha, params.beta
    m = np.empty(kmax + 1)
    m[0] = params.mass
    if kmax >= 1:
        m[1] = (b - a) * m[0] / (a + b + 2.0)
    for k in range(1, kmax):
        m[k + 1] = ((b - a) * m[k] + k * m[k - 1]) / (k + a + b + 2.0)
    return m


def closed_form_weight_ratio(rule: QuadratureRule) -> np.ndarray:
    """``lambda_j (1 - t_j^2) p_{n+1}'(t_j)^2 / (2n + a + b + 3)`` for every node."""
    p = rule.params
    deriv = derivative_table(p, rule.n + 1, rule.nodes)[:, -1]
    return rule.weights * (1.0 - rule.nodes**2) * deriv**2 / (2 * rule.n + p.alpha + p.beta + 3.0)


def weight_asymptotics_report(params: JacobiParams, n_list, growth_tolerance: float = 1.5) -> ExperimentReport:
    """Compare weights and node gaps with ``j^(2a+1)/n^(2a+2)`` and ``(j/n)^2`` for ``j <= n/2``.

    The band of each ratio family is ``max/min`` over ``j``; the verdict is
    PASS when no band exceeds ``growth_tolerance`` times its value at the
    smallest ``n``.
    """
    n_list = sorted(int(n) for n in n_list)
    if not n_list or n_list[0] < 8:
        raise ValueError("weight asymptotics need every n >= 8")
    rows = []
    a = params.alpha
    for n in n_list:
        rule = build_rule(params, n)
        j = np.arange(1, n // 2 + 1)
        lam = rule.weights[: j.size]
        t = rule.nodes[: j.size]
        r_weight = lam / (j ** (2 * a + 1) / float(n) ** (2 * a + 2))
        r_node = (1.0 - t**2) / (j / n) ** 2
        rows.append(
            {
                "n": n,
                "weight_ratio_min": float(r_weight.min()),
                "weight_ratio_max": float(r_weight.max()),
                "node_ratio_min": float(r_node.min()),
                "node_ratio_max": float(r_node.max()),
                "weight_band": float(r_weight.max() / r_weight.min()),
                "node_band": float(r_node.max() / r_node.min()),
            }
        )
    ok = all(
        row[key] <= growth_tolerance * rows[0][key]
        for row in rows
        for key in ("weight_band", "node_band")
    )
    return ExperimentReport(
        experiment="weight_asymptotics",
        config={"alpha": params.alpha, "beta": params.beta, "n_list": n_list},
        table=rows,
        verdict="PASS" if ok else "FAIL",
    )


# ---------------------------------------------------------------------------
# composite rules for integrands that are only piecewise smooth


def _grade_cuts(lo: float, hi: float) -> list[float]:
    """Geometric cuts making every piece of ``[lo, hi]`` no wider than its distance to +-1."""
    cuts = []
    right = hi
    while right > 0.0 and right - lo > 1.0 - right:
        right = 2.0 * right - 1.0
        cuts.append(right)
    left = lo
    while left < 0.0 and right - left > 1.0 + left:
        left = 2.0 * left + 1.0
        cuts.append(left)
    return cuts


def _graded_split(edges: list[float]) -> list[float]:
    out = set(edges)
    for lo, hi in zip(edges[1:-2], edges[2:-1]):
        out.update(_grade_cuts(lo, hi))
    return sorted(out)


def panel_edges(breakpoints=(), grading_levels=0) -> list[float]:
    """Panel boundaries: breakpoints, 0, and ``2^-k`` grading toward the ends.

    ``grading_levels`` is an int (both ends) or a ``(left, right)`` pair.
    """
    if isinstance(grading_levels, int):
        grading_levels = (grading_levels, grading_levels)
    left, right = grading_levels
    pts = {float(x) for x in breakpoints if -1.0 < float(x) < 1.0}
    pts.update(-1.0 + 2.0**-k for k in range(1, left + 1))
    pts.update(1.0 - 2.0**-k for k in range(1, right + 1))
    if not pts:
        return [-1.0, 1.0]
    pts.add(0.0)
    edges = [-1.0] + sorted(pts) + [1.0]
    return _graded_split(edges)


def composite_rule(params: JacobiParams, m: int, breakpoints=(), grading_levels=0):
    """Nodes and weights with ``sum w_i g(t_i) ~ int g(t) w_{alpha beta}(t) dt``.

    The interval is cut at ``breakpoints`` (and at 0 when cut at all).  The
    two end panels absorb the endpoint singularity of the weight through a
    Gauss-Jacobi rule, interior panels use Gauss-Legendre nodes times the
    explicit weight.  ``m`` is the number of nodes per panel.
    """
    edges = panel_edges(breakpoints, grading_levels)
    a, b = params.alpha, params.beta
    if len(edges) == 2:
        rule = build_rule(params, m - 1)
        return rule.nodes.copy(), rule.weights.copy()
    nodes, weights = [], []
    legendre = build_rule(JacobiParams(0.0, 0.0), m - 1)
    last = len(edges) - 2
    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        h = hi - lo
        if k == 0:
            ref = build_rule(JacobiParams(0.0, b), m - 1)
            t = lo + h * (ref.nodes + 1.0) / 2.0
            w = ref.weights * (h / 2.0) ** (b + 1.0) * (1.0 - t) ** a
        elif k == last:
            ref = build_rule(JacobiParams(a, 0.0), m - 1)
            t = hi - h * (1.0 - ref.nodes) / 2.0
            w = ref.weights * (h / 2.0) ** (a + 1.0) * (1.0 + t) ** b
        else:
            t = lo + h * (legendre.nodes + 1.0) / 2.0
            w = legendre.weights * (h / 2.0) * (1.0 - t) ** a * (1.0 + t) ** b
        nodes.append(t)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def refinement_schedule(start: int, cap: int = 512):
    m = max(2, int(start))
    while m < cap:
        yield m
        m *= 2
    yield cap


class RefinementError(RuntimeError):
    """Successive refinements failed to agree; carries the last two values."""

    def __init__(self, message: str, previous: float, last: float):
        super().__init__(f"{message} (last two values {previous!r}, {last!r})")
        self.previous = previous
        self.last = last


def _mass_identity(rule: QuadratureRule) -> float:
    return abs(float(np.sum(rule.weights)) - rule.params.mass) / rule.params.mass


def rule_diagnostics(rule: QuadratureRule) -> dict:
    """Mass defect, positivity and weight agreement with the eigenvalue method."""
    _, gw_weights = golub_welsch(rule.params, rule.n)
    return {
        "mass_defect": _mass_identity(rule),
        "min_weight": float(rule.weights.min()),
        "eigen_weight_agreement": float(
            np.max(np.abs(rule.weights - gw_weights)) / np.max(rule.weights)
        ),
        "monotone_nodes": bool(np.all(np.diff(rule.nodes) < 0)),
    }


def chebyshev_weight_defect(n: int) -> float:
    rule = build_rule(JacobiParams(-0.5, -0.5), n)
    return float(np.max(np.abs(rule.weights - math.pi / (n + 1))))
