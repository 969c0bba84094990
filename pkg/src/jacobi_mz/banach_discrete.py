"""Finite-dimensional checks: the orthogonal quadrature matrix, Hilbert-matrix
blocks, and Rademacher / Gaussian / Jacobi-type-2 constants in ``l_q^d``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .gauss_jacobi import build_rule
from .jacobi_core import JacobiParams, normalized_table
from .mz_inequalities import random_polynomial, trial_rng
from .profiles import NormProfile
from .weighted_norms import VectorCoefficients, VectorSpaceModel, continuous_lp_norm

ORTHOGONALITY_TOL = 1e-9
MAX_QUADRATURE_MATRIX_DEGREE = 150
MAX_SIGN_VECTORS = 14
MIN_GAUSSIAN_SAMPLES = 10_000
POWER_ITERATION_STARTS = 20


class OrthogonalityError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class QuadratureMatrix:
    """``a_jk = sqrt(lambda_j) p_k(t_j)``; rows follow the decreasing nodes."""

    params: JacobiParams
    n: int
    matrix: np.ndarray
    defect: float

    def to_csv(self, fh=None) -> str:
        from .profiles import rows_to_csv

        rows = [{"j": j + 1, **{f"k{k}": v for k, v in enumerate(row)}} for j, row in enumerate(self.matrix)]
        return rows_to_csv(rows, fh)


def orthogonality_defect(a: np.ndarray) -> float:
    return float(np.linalg.norm(a @ a.T - np.eye(a.shape[0]), "fro"))


def quadrature_matrix(params: JacobiParams, n: int) -> QuadratureMatrix:
    if not 0 <= n <= MAX_QUADRATURE_MATRIX_DEGREE:
        raise ValueError(f"n must lie in [0, {MAX_QUADRATURE_MATRIX_DEGREE}]")
    rule = build_rule(params, n)
    a = np.sqrt(rule.weights)[:, None] * normalized_table(params, n, rule.nodes)
    defect = orthogonality_defect(a)
    if defect > ORTHOGONALITY_TOL:
        raise OrthogonalityError(f"A A^T deviates from the identity by {defect:.3g}")
    a.setflags(write=False)
    return QuadratureMatrix(params, n, a, defect)


def row_sup_bound(params: JacobiParams, n: int) -> float:
    """``sum_k max_l |a_lk|^2``."""
    a = quadrature_matrix(params, n).matrix
    return float(np.sum(np.max(a * a, axis=0)))


def hilbert_index_set(n: int) -> range:
    """``ceil(n/4) <= j <= floor(3n/4)``."""
    return range(-(-n // 4), (3 * n) // 4 + 1)


def hilbert_block(n: int) -> np.ndarray:
    idx = np.asarray(hilbert_index_set(n), dtype=float)
    return 1.0 / (idx[:, None] - idx[None, :] + 0.5)


def block_size(n: int) -> int:
    return len(hilbert_index_set(n))


@dataclass(frozen=True)
class NormEstimate:
    value: float
    lower_bound: bool
    method: str


def _dual(v: np.ndarray, p: float) -> np.ndarray:
    """Unit vector in ``l_p'`` attaining ``<dual, v> = ||v||_p``."""
    norm = np.linalg.norm(v, p)
    if norm == 0.0:
        return np.zeros_like(v)
    return np.sign(v) * (np.abs(v) / norm) ** (p - 1.0)


def power_pnorm(a: np.ndarray, p: float, rng: np.random.Generator, starts: int = POWER_ITERATION_STARTS, max_iter: int = 200) -> float:
    """Lower bound for ``||A||_{p -> p}`` by dual-vector power iteration from random starts."""
    q = p / (p - 1.0)
    best = 0.0
    for _ in range(starts):
        x = rng.standard_normal(a.shape[1])
        x /= np.linalg.norm(x, p)
        est = 0.0
        for _ in range(max_iter):
            y = a @ x
            est = max(est, float(np.linalg.norm(y, p)))
            z = a.T @ _dual(y, p)
            if np.linalg.norm(z, q) <= z @ x * (1.0 + 1e-12):
                break
            x = _dual(z, q)
            x /= np.linalg.norm(x, p)
        best = max(best, est)
    return best


def hilbert_block_norm(n: int, p, seed: int = 0) -> NormEstimate:
    """``||A_n||_{p -> p}``: exact for ``p`` in {1, 2, inf}, a lower bound otherwise."""
    p = float(p)
    if p < 1.0:
        raise ValueError("p must be >= 1")
    a = hilbert_block(n)
    if a.shape[0] < 2:
        raise ValueError("the index block needs at least two entries")
    if p == 2.0:
        return NormEstimate(float(np.linalg.norm(a, 2)), False, "largest singular value")
    if p == 1.0:
        return NormEstimate(float(np.abs(a).sum(axis=0).max()), False, "max column sum")
    if math.isinf(p):
        return NormEstimate(float(np.abs(a).sum(axis=1).max()), False, "max row sum")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(n),)))
    return NormEstimate(power_pnorm(a, p, rng), True, "power iteration lower bound")


def hilbert_profile(n_list, p, seed: int = 0) -> NormProfile:
    return NormProfile(tuple(n_list), tuple(hilbert_block_norm(n, p, seed).value for n in n_list), f"hilbert block, p={p:g}")


def _vectors(vectors) -> np.ndarray:
    v = np.asarray(vectors, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.ndim != 2 or v.shape[0] == 0:
        raise ValueError("need a nonempty list of vectors")
    return v


def sign_patterns(m: int) -> np.ndarray:
    """All ``2^m`` sign vectors, in a fixed order."""
    if m > MAX_SIGN_VECTORS:
        raise ValueError(f"brute-force enumeration is limited to m <= {MAX_SIGN_VECTORS}, got {m}")
    return np.array(list(itertools.product((1.0, -1.0), repeat=m)))


def rademacher_mean(model: VectorSpaceModel, vectors) -> float:
    """``(2^-m sum_eps ||sum_j eps_j x_j||^2)^(1/2)``, by exhaustive enumeration."""
    v = _vectors(vectors)
    sums = sign_patterns(v.shape[0]) @ v
    return math.sqrt(float(np.mean(model.norm(sums) ** 2)))


def _l2_sum(model: VectorSpaceModel, v: np.ndarray) -> float:
    total = math.sqrt(float(np.sum(model.norm(v) ** 2)))
    if total == 0.0:
        raise ValueError("all vectors are zero; the ratio is 0/0")
    return total


def rademacher_type2_constant(model: VectorSpaceModel, vectors) -> float:
    v = _vectors(vectors)
    return rademacher_mean(model, v) / _l2_sum(model, v)


def pn_type2_constant(params: JacobiParams, model: VectorSpaceModel, table, n: int) -> float:
    """``||sum_j p_j x_j||_{2; alpha, beta} / (sum_j ||x_j||^2)^(1/2)`` for one table."""
    c = np.asarray(table.coeffs if isinstance(table, VectorCoefficients) else table, dtype=float)
    if c.size == 0:
        raise ValueError("empty coefficient table; the ratio is 0/0")
    poly = VectorCoefficients(c)
    if poly.degree > n:
        raise ValueError(f"table has {poly.degree + 1} entries, more than n + 1 = {n + 1}")
    return continuous_lp_norm(params, 2, poly, model) / _l2_sum(model, poly.coeffs)


def pn_type2_profile(params: JacobiParams, model: VectorSpaceModel, n_list, tables: int = 200, seed: int = 0) -> NormProfile:
    """Largest ratio over random tables, per ``n``."""
    values = []
    for n in n_list:
        values.append(
            max(
                pn_type2_constant(params, model, random_polynomial(trial_rng(seed, n, k), n, model.dim), n)
                for k in range(tables)
            )
        )
    return NormProfile(tuple(n_list), tuple(values), f"(p_n)-type 2, l_{model.q:g}^{model.dim}")


@dataclass(frozen=True)
class MonteCarloRatio:
    ratio: float
    stderr: float
    samples: int


def gaussian_vs_rademacher_ratio(model: VectorSpaceModel, vectors, samples: int = MIN_GAUSSIAN_SAMPLES, seed: int = 0) -> MonteCarloRatio:
    """Monte-Carlo Gaussian mean over the exact Rademacher mean, with a standard error."""
    if samples < MIN_GAUSSIAN_SAMPLES:
        raise ValueError(f"at least {MIN_GAUSSIAN_SAMPLES} samples are required")
    v = _vectors(vectors)
    rad = rademacher_mean(model, v)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed)))
    sq = model.norm(rng.standard_normal((samples, v.shape[0])) @ v) ** 2
    mean_sq = float(np.mean(sq))
    gauss = math.sqrt(mean_sq)
    se_mean = float(np.std(sq, ddof=1)) / math.sqrt(samples)
    se_gauss = se_mean / (2.0 * gauss) if gauss > 0 else 0.0
    return MonteCarloRatio(gauss / rad, se_gauss / rad, samples)
