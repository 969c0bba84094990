import mpmath
import numpy as np
import pytest

from jacobi_mz.jacobi_core import JacobiParams

TEST_PARAMS = [(0.0, 0.0), (-0.5, -0.5), (0.5, 0.5), (1.0, 2.0), (-0.9, 3.0)]


@pytest.fixture(params=TEST_PARAMS, ids=lambda ab: f"a={ab[0]},b={ab[1]}")
def params(request):
    return JacobiParams(*request.param)


def mp_norm_sq(n, a, b):
    if n == 0:
        return 2 ** (a + b + 1) * mpmath.gamma(a + 1) * mpmath.gamma(b + 1) / mpmath.gamma(a + b + 2)
    return (
        2 ** (a + b + 1)
        / (2 * n + a + b + 1)
        * mpmath.gamma(n + a + 1)
        * mpmath.gamma(n + b + 1)
        / (mpmath.gamma(n + a + b + 1) * mpmath.factorial(n))
    )


def mp_normalized_jacobi(n, a, b, t, dps=40):
    """Orthonormal Jacobi value from the explicit binomial sum, in high precision."""
    with mpmath.workdps(dps):
        a, b, t = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(t)
        total = mpmath.fsum(
            mpmath.binomial(n + a, n - s) * mpmath.binomial(n + b, s) * ((t - 1) / 2) ** s * ((t + 1) / 2) ** (n - s)
            for s in range(n + 1)
        )
        return float(total / mpmath.sqrt(mp_norm_sq(n, a, b)))


def mp_moment(a, b, k, dps=40):
    dps = dps + k  # the alternating binomial sum cancels about k digits
    """int t^k (1-t)^a (1+t)^b dt via t = 2u - 1 and the binomial theorem over Beta integrals."""
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        total = mpmath.mpf(0)
        for i in range(k + 1):
            total += mpmath.binomial(k, i) * 2**i * (-1) ** (k - i) * mpmath.beta(i + b + 1, a + 1)
        return float(2 ** (a + b + 1) * total)


def rng(seed=0):
    return np.random.default_rng(seed)
