"""Scalar special functions of the nonlinear phase mu and the Bessel K0 kernel."""

import numpy as np

from . import kernels
from .errors import DomainError


def bessel_k0(x):
    """Modified Bessel function of the second kind, order zero, for x > 0.

    Power series below x = 2, Steed's continued fraction above; relative
    accuracy is close to machine precision on both branches.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("bessel_k0 requires x > 0")
    out = kernels.k0(arr)
    return float(out.reshape(-1)[0]) if np.ndim(x) == 0 else out


_F_NUM = np.array([496.0, 4644.0, 15399.0, 21303.0, 10206.0])  # coefficients of mu^8 .. mu^0


def f_mu(mu):
    """mu (10206 + 21303 mu^2 + 15399 mu^4 + 4644 mu^6 + 496 mu^8) / (15 (3+mu^2)^3 (9+4mu^2)^2)."""
    m = np.asarray(mu, dtype=float)
    m2 = m * m
    return m * np.polyval(_F_NUM, m2) / (15.0 * (3.0 + m2) ** 3 * (9.0 + 4.0 * m2) ** 2)


def f_mu_prime(mu):
    """Derivative of :func:`f_mu` with respect to mu."""
    m = np.asarray(mu, dtype=float)
    m2 = m * m
    num = np.polyval(_F_NUM, m2)
    dnum = 2.0 * m * np.polyval(_F_NUM[:-1] * np.arange(4, 0, -1), m2)
    d = 3.0 + m2
    e = 9.0 + 4.0 * m2
    base = (num + m * dnum) / (15.0 * d**3 * e**2)
    return base - f_mu(m) * (6.0 * m / d + 16.0 * m / e)


def cubic_term(mu):
    """4 mu^3 / (15 (3 + mu^2)), minus the closed form of b8 + b9."""
    m = np.asarray(mu, dtype=float)
    return 4.0 * m**3 / (15.0 * (3.0 + m * m))


def cubic_term_prime(mu):
    m = np.asarray(mu, dtype=float)
    m2 = m * m
    return 4.0 * (9.0 * m2 + m2 * m2) / (15.0 * (3.0 + m2) ** 2)


def mu_f_mu(mu):
    return np.asarray(mu, dtype=float) * f_mu(mu)


def mu_f_mu_prime(mu):
    m = np.asarray(mu, dtype=float)
    return f_mu(m) + m * f_mu_prime(m)


def log_jacobian_density(mu):
    """ln sqrt(1 + mu^2/3), the per-sample log determinant of the receiver map."""
    m = np.asarray(mu, dtype=float)
    return 0.5 * np.log1p(m * m / 3.0)
