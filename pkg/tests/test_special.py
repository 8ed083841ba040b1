from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fiberinfo.special import (cubic_term, cubic_term_prime, f_mu, f_mu_prime, log_jacobian_density,
                               mu_f_mu, mu_f_mu_prime)


def f_exact(m: Fraction) -> Fraction:
    m2 = m * m
    return m * (10206 + 21303 * m2 + 15399 * m2**2 + 4644 * m2**3 + 496 * m2**4) / (
        15 * (3 + m2) ** 3 * (9 + 4 * m2) ** 2)


def test_f_at_zero():
    assert f_mu(0.0) == 0.0


def test_f_at_one_exact_rational():
    assert f_exact(Fraction(1)) == Fraction(52048, 162240)
    assert f_mu(1.0) == pytest.approx(52048 / 162240, rel=1e-15)


def test_f_large_mu_asymptote():
    assert f_mu(1e3) / (31.0 / (15.0 * 1e3)) == pytest.approx(1.0, abs=0.01)


@given(st.fractions(min_value=0, max_value=40, max_denominator=97))
def test_f_matches_rational_arithmetic(m):
    assert f_mu(float(m)) == pytest.approx(float(f_exact(m)), rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("fn, dfn", [(f_mu, f_mu_prime), (cubic_term, cubic_term_prime),
                                      (mu_f_mu, mu_f_mu_prime)])
def test_derivatives_against_central_differences(fn, dfn):
    m = np.linspace(0.05, 30.0, 300)
    h = 1e-5 * (1 + m)
    fd = (fn(m + h) - fn(m - h)) / (2 * h)
    np.testing.assert_allclose(dfn(m), fd, rtol=1e-7, atol=1e-12)


def test_log_jacobian_density_values():
    assert log_jacobian_density(0.0) == 0.0
    assert log_jacobian_density(1.0) == pytest.approx(0.5 * np.log(4.0 / 3.0), rel=1e-15)
    m = np.linspace(0, 50, 200)
    assert np.all(np.diff(log_jacobian_density(m)) > 0)
