import math

import numpy as np
import pytest
from scipy.integrate import quad

from jacobi_mz.jacobi_core import JacobiParams, normalized_table
from jacobi_mz.means_transplant import (
    TransplantBand,
    band_profile,
    jacobi_mean,
    kernel_grid,
    psi_values,
    transplant_bands,
    transplant_kernel,
    transplant_kernel_bound,
    transplant_ratio,
    transplant_window,
)
from jacobi_mz.mz_inequalities import WindowError
from jacobi_mz.weighted_norms import VectorCoefficients, VectorSpaceModel, continuous_lp_norm


def table(seed, n, dim=1):
    return VectorCoefficients(np.random.default_rng(seed).uniform(-1, 1, size=(n + 1, dim)))


class TestMean:
    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5])
    def test_parseval_when_weight_matches(self, alpha):
        # at p = 2 the weight exponent equals alpha exactly when gamma = 0
        poly = table(1, 8, 3)
        got = jacobi_mean(alpha, 0.0, 2, poly, VectorSpaceModel(2.0, 3))
        assert got == pytest.approx(math.sqrt(np.sum(poly.coeffs**2)), rel=1e-12)

    @pytest.mark.parametrize("alpha,gamma,p", [(0.0, 0.3, 3.0), (1.0, -0.5, 1.5), (-0.5, 0.2, 2.5)])
    def test_single_coefficient(self, alpha, gamma, p):
        x0 = np.array([[0.6, -0.8]])
        e = (alpha + gamma) * p / 2
        c0 = normalized_table(JacobiParams(alpha, alpha), 0, np.array([0.0]))[0, 0]
        scalar, _ = quad(lambda t: abs(c0) ** p * (1 - t * t) ** e, -1, 1, epsrel=1e-13)
        got = jacobi_mean(alpha, gamma, p, VectorCoefficients(x0), VectorSpaceModel(2.0, 2))
        assert got == pytest.approx(1.0 * scalar ** (1 / p), rel=1e-9)

    def test_matches_continuous_norm(self):
        poly = table(2, 12)
        assert jacobi_mean(0.0, 0.0, 2, poly) == pytest.approx(continuous_lp_norm(JacobiParams(0, 0), 2, poly), rel=1e-13)

    def test_not_integrable(self):
        with pytest.raises(ValueError):
            jacobi_mean(-0.5, -1.0, 2, table(0, 3))
        with pytest.raises(ValueError):
            jacobi_mean(0.0, 0.0, math.inf, table(0, 3))


class TestRatio:
    def test_identical_families(self):
        assert transplant_ratio(0.7, 0.7, 0.1, 2.5, table(3, 10)) == 1.0

    def test_symmetry_and_scaling(self):
        poly = table(4, 10)
        r = transplant_ratio(0.0, -0.5, 0.0, 2.0, poly)
        assert r * transplant_ratio(-0.5, 0.0, 0.0, 2.0, poly) == pytest.approx(1.0, rel=1e-15)
        assert transplant_ratio(0.0, -0.5, 0.0, 2.0, poly.scaled(37.0)) == pytest.approx(r, rel=1e-13)

    def test_window(self):
        assert transplant_window(0.0, 2.0) and not transplant_window(2.0, 2.0)
        with pytest.raises(WindowError):
            transplant_ratio(0.0, -0.5, 2.0, 2.0, table(0, 4))

    def test_zero_table(self):
        with pytest.raises(ValueError):
            transplant_ratio(0.0, -0.5, 0.0, 2.0, VectorCoefficients(np.zeros(4)))

    def test_band_stability(self):
        bands = transplant_bands(0.0, -0.5, 0.0, 2.0, [16, 32, 64], tables=100)
        assert bands[-1].spread <= 1.25 * bands[0].spread
        assert all(b.min_ratio <= b.max_ratio for b in bands)
        profile = band_profile(bands)
        assert profile.ns == (16, 32, 64)

    def test_band_spread(self):
        assert TransplantBand(4, 0.5, 1.5).spread == 2.0
        assert TransplantBand(4, 0.9, 1.5).spread == 1.5


class TestKernel:
    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.5])
    def test_psi_isometry(self, alpha):
        rng = np.random.default_rng(5)
        for trial in range(30):
            poly = VectorCoefficients(rng.normal(size=rng.integers(1, 10)))
            lhs, _ = quad(lambda s: psi_values(alpha, poly, np.array([s]))[0, 0] ** 2, 0, np.pi, limit=200, epsrel=1e-12)
            rhs = continuous_lp_norm(JacobiParams(alpha, alpha), 2, poly) ** 2
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_chebyshev_is_cosine_sum(self):
        t, s = kernel_grid(40)
        n = 9
        expected = (1 + 2 * sum(np.cos(j * t) * np.cos(j * s) for j in range(1, n + 1))) / np.pi
        assert np.allclose(transplant_kernel(-0.5, -0.5, n, t, s), expected, atol=1e-12)

    def test_chebyshev_bound_is_order_one(self):
        values = [transplant_kernel_bound(-0.5, -0.5, n) for n in (8, 16, 32, 64)]
        assert max(values) <= 2.0

    def test_degree_zero_finite(self):
        assert 0 < transplant_kernel_bound(0.0, -0.5, 0) <= math.pi * 2

    def test_bound_stable_in_n(self):
        values = [transplant_kernel_bound(0.0, 1.0, n) for n in (8, 16, 32, 64)]
        assert all(b <= 1.10 * a for a, b in zip(values, values[1:]))

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            transplant_kernel_bound(0.0, 0.0, 4, (np.array([1.0]), np.array([1.0])))
        with pytest.raises(ValueError):
            transplant_kernel_bound(0.0, 0.0, 4, (np.array([0.0]), np.array([1.0])))
        t, s = kernel_grid(10)
        assert t.size == 90 and np.all(t != s)
