import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import TEST_PARAMS
from jacobi_mz.gauss_jacobi import build_rule
from jacobi_mz.jacobi_core import JacobiParams, normalized_table
from jacobi_mz.mz_inequalities import (
    MIN_TRIALS,
    PWindow,
    extremal_polynomial,
    left_constant_profile,
    kernel_integral,
    kernel_integral_window,
    p_window,
    random_polynomial,
    right_extremal_profile,
    right_ratio,
    trial_rng,
)
from jacobi_mz.weighted_norms import VectorSpaceModel

LEGENDRE = JacobiParams(0.0, 0.0)
DOUBLINGS = [8, 16, 32, 64, 128]


def window_oracle(a, b):
    """Exact rational thresholds for rational exponents."""
    a, b = Fraction(a), Fraction(b)
    mu = max(Fraction(1), 4 * (a + 1) / (2 * a + 5), 4 * (b + 1) / (2 * b + 5))
    m = max(Fraction(1), 4 * (a + 1) / (2 * a + 3), 4 * (b + 1) / (2 * b + 3))
    M = None if m == 1 else m / (m - 1)
    return mu, m, M


class TestWindow:
    @pytest.mark.parametrize(
        "a,b,mu,m,M",
        [(0, 0, 1, 4 / 3, 4), (-0.5, -0.5, 1, 1, math.inf), (1, 1, 8 / 7, 8 / 5, 8 / 3)],
    )
    def test_examples(self, a, b, mu, m, M):
        w = p_window(JacobiParams(a, b))
        assert (w.mu, w.m) == pytest.approx((mu, m), rel=1e-15)
        assert w.M == M or w.M == pytest.approx(M, rel=1e-15)

    @pytest.mark.parametrize("a,b", TEST_PARAMS + [(3, 3), (2, -0.75), (-0.25, 5)])
    def test_matches_rational_oracle_and_duality(self, a, b):
        w = p_window(JacobiParams(a, b))
        mu, m, M = window_oracle(a, b)
        assert w.mu == pytest.approx(float(mu), rel=1e-15)
        assert w.m == pytest.approx(float(m), rel=1e-15)
        if M is None:
            assert w.M == math.inf
        else:
            assert w.M == pytest.approx(float(M), rel=1e-15)
            assert 1 / w.m + 1 / w.M == 1.0
        assert 1 <= w.mu <= w.m <= 2 <= w.M

    @settings(max_examples=200)
    @given(a=st.floats(-0.999, 50), b=st.floats(-0.999, 50))
    def test_invariants_property(self, a, b):
        w = p_window(JacobiParams(a, b))
        assert 1 <= w.mu <= w.m <= 2 <= w.M
        if w.m > 1:
            assert 1 / w.m + 1 / w.M == pytest.approx(1.0, abs=4e-16)

    def test_contains_and_extremal_ranges(self):
        w = p_window(LEGENDRE)
        assert w.contains(2) and not w.contains(4) and not w.contains(1)
        assert w.right_window_for("jacobi_poly") == (1.0, 4.0)
        assert w.right_window_for("first_lagrange") == (1.0, math.inf)
        with pytest.raises(ValueError):
            w.right_window_for("other")

    def test_window_is_a_frozen_record(self):
        w = PWindow(1.0, 1.5, 3.0)
        with pytest.raises(AttributeError):
            w.mu = 2.0


class TestLeftInequality:
    def test_p2_exactness_up_to_degree_n(self):
        profile = left_constant_profile(LEGENDRE, 2, [8, 16, 32], degree="n")
        assert np.allclose(profile.values, 1.0, atol=1e-9)

    @pytest.mark.parametrize("alpha,beta", TEST_PARAMS)
    def test_p2_ratio_is_one_for_degree_n(self, alpha, beta):
        params = JacobiParams(alpha, beta)
        rng = trial_rng(5, 10, 0)
        from jacobi_mz.mz_inequalities import left_ratio

        for dim in (1, 3):
            poly = random_polynomial(rng, 10, dim)
            assert left_ratio(params, 2, 10, poly) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("trials", [0, MIN_TRIALS - 1])
    def test_too_few_trials(self, trials):
        with pytest.raises(ValueError):
            left_constant_profile(LEGENDRE, 2, [8], trials=trials)

    def test_sup_norm_profile_bounded(self):
        profile = left_constant_profile(LEGENDRE, math.inf, DOUBLINGS)
        assert profile.classify() == "bounded"
        assert max(profile.values) <= 1.0 + 1e-12  # nodes are scan points of a finer sup

    def test_vector_model(self):
        profile = left_constant_profile(LEGENDRE, 3, [8, 16, 32], model=VectorSpaceModel(1.0, 2))
        assert profile.classify() == "bounded"

    def test_seeded_and_schedule_independent(self):
        serial = left_constant_profile(JacobiParams(0.5, -0.5), 3, [8, 16], seed=7)
        with ThreadPoolExecutor(4) as pool:
            threaded = left_constant_profile(JacobiParams(0.5, -0.5), 3, [8, 16], seed=7, executor=pool)
        assert serial.values == threaded.values
        other = left_constant_profile(JacobiParams(0.5, -0.5), 3, [8, 16], seed=8)
        assert other.values != serial.values

    def test_trial_rng_depends_on_cell_only(self):
        a = trial_rng(0, 16, 3).uniform(size=4)
        trial_rng(0, 8, 0).uniform(size=100)
        assert np.array_equal(a, trial_rng(0, 16, 3).uniform(size=4))
        assert not np.array_equal(a, trial_rng(0, 16, 4).uniform(size=4))


class TestRightInequality:
    def test_p2_ratio_is_one(self):
        profile = right_extremal_profile(LEGENDRE, 2, DOUBLINGS)
        assert np.allclose(profile.values, 1.0, atol=1e-9)

    def test_supercritical_growth(self):
        profile = right_extremal_profile(LEGENDRE, 6, DOUBLINGS)
        assert profile.exponent > 0
        assert profile.classify() == "diverges"

    def test_first_lagrange_below_mu(self):
        params = JacobiParams(3.0, 3.0)
        assert p_window(params).mu == pytest.approx(16 / 11)
        assert right_extremal_profile(params, 1, DOUBLINGS, "first_lagrange").classify() == "diverges"
        assert right_extremal_profile(params, 2, DOUBLINGS, "first_lagrange").classify() == "bounded"

    def test_first_lagrange_is_cardinal(self):
        params = JacobiParams(0.5, 1.5)
        rule = build_rule(params, 12)
        poly = extremal_polynomial(params, 12, "first_lagrange")
        vals = poly.evaluate(params, rule.nodes)[:, 0]
        expected = np.zeros(13)
        expected[0] = 1.0
        assert np.allclose(vals, expected, atol=1e-12)

    def test_rejects_infinite_p_and_unknown_extremal(self):
        with pytest.raises(ValueError):
            right_extremal_profile(LEGENDRE, math.inf, DOUBLINGS)
        with pytest.raises(ValueError):
            extremal_polynomial(LEGENDRE, 8, "chebyshev")

    @settings(max_examples=15, deadline=None)
    @given(s=st.floats(1e-3, 1e3), p=st.sampled_from([1.0, 2.5, 3.0, 5.0]), n=st.integers(2, 20))
    def test_homogeneity(self, s, p, n):
        poly = extremal_polynomial(JacobiParams(0.5, 0.0), n, "jacobi_poly")
        base = right_ratio(JacobiParams(0.5, 0.0), p, n, poly)
        assert right_ratio(JacobiParams(0.5, 0.0), p, n, poly.scaled(s)) == pytest.approx(base, rel=1e-11)

    @pytest.mark.parametrize(
        "p,bounded",
        [
            (1.5, True),
            (2, True),
            (3, True),
            (3.9, True),
            pytest.param(
                4,
                False,
                marks=pytest.mark.xfail(
                    strict=True,
                    reason="endpoint growth is logarithmic; the fitted slope at n <= 128 (0.040) is "
                    "indistinguishable from p = 3.9 (0.035)",
                ),
            ),
            (5, False),
            (6, False),
        ],
    )
    def test_window_consistency(self, p, bounded):
        profile = right_extremal_profile(LEGENDRE, p, DOUBLINGS, "jacobi_poly")
        assert (profile.classify() == "bounded") is bounded


def direct_kernel_integral(b, p):
    def f(t):
        return abs(abs(t) ** -b - 1) * abs(t) ** (-1 / p) / abs(t - 1)

    pieces = [(-np.inf, -1), (-1, 0), (0, 1), (1, 2), (2, np.inf)]
    return sum(quad(f, lo, hi, limit=500)[0] for lo, hi in pieces)


class TestKernelIntegral:
    def test_zero_exponent(self):
        assert kernel_integral(0.0, 2.0) == 0.0

    @pytest.mark.parametrize("b,p", [(0.25, 2), (0.45, 2), (-0.3, 2), (0.1, 1.5), (0.5, 4)])
    def test_matches_direct_quadrature(self, b, p):
        assert kernel_integral(b, p) == pytest.approx(direct_kernel_integral(b, p), rel=1e-6)

    def test_stable_under_cutoff_doubling(self):
        from jacobi_mz import mz_inequalities as mz

        base = kernel_integral(0.25, 2.0)
        original = mz.KERNEL_INTEGRAL_START
        try:
            mz.KERNEL_INTEGRAL_START = 2 * original
            assert kernel_integral(0.25, 2.0) == pytest.approx(base, rel=1e-2)
        finally:
            mz.KERNEL_INTEGRAL_START = original

    @pytest.mark.parametrize("b,p", [(0.5, 2), (-0.5, 2), (0.75, 4), (-0.25, 4), (0.8, 3)])
    def test_boundary_and_outside_are_infinite(self, b, p):
        assert not kernel_integral_window(b, p)
        assert kernel_integral(b, p) == math.inf

    @settings(max_examples=20, deadline=None)
    @given(p=st.floats(1.2, 8.0), frac=st.floats(0.05, 0.95))
    def test_finite_inside_window(self, p, frac):
        b = -1 / p + frac * 1.0  # window has length exactly 1
        if b == 0:
            return
        assert kernel_integral_window(b, p)
        assert math.isfinite(kernel_integral(b, p))

    def test_exponent_range(self):
        for p in (1.0, math.inf, 0.5):
            with pytest.raises(ValueError):
                kernel_integral(0.2, p)
