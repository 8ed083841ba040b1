import numpy as np
import pytest
import scipy.integrate

from fiberinfo.errors import QuadratureError
from fiberinfo.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, integrate


def test_rule_exactness():
    # Kronrod 15 integrates through degree 22, the embedded Gauss 7 through degree 13
    for k in range(23):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert KRONROD_WEIGHTS @ NODES**k == pytest.approx(exact, abs=1e-14)
    for k in range(14):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert GAUSS_WEIGHTS @ NODES**k == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("f, a, b", [
    (lambda x: np.exp(-x) * np.cos(5 * x), 0.0, 10.0),
    (lambda x: 1.0 / (1.0 + 1e4 * (x - 0.3) ** 2), 0.0, 1.0),
])
def test_against_scipy_quad(f, a, b):
    ref, _ = scipy.integrate.quad(f, a, b, epsabs=0, epsrel=1e-13, limit=500, points=None)
    got = integrate(f, [a, b], rtol=1e-12)
    assert got.value == pytest.approx(ref, rel=1e-11)
    assert got.error <= 1e-12 * abs(got.value)


def test_log_singularity_exact():
    a = 1e-12
    got = integrate(np.log, [a, 1.0], rtol=1e-12)
    assert got.value == pytest.approx(-1.0 - a * np.log(a) + a, rel=1e-11)


def test_breakpoints_must_increase():
    with pytest.raises(ValueError):
        integrate(np.sin, [1.0, 0.0])


def test_nonconvergence_reported():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sin(1.0 / x), [1e-9, 1.0], rtol=1e-14, max_panels=50)
