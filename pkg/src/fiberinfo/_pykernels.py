"""Pure-numpy fallback for the compiled kernels in ``_ckernels.pyx``."""

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_MAXIT = 10000


def _k0_series(x):
    q = 0.25 * x * x
    term = np.ones_like(x)
    harmonic = 0.0
    i0 = np.ones_like(x)
    tail = np.zeros_like(x)
    for k in range(1, 40):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        i0 += term
        tail += term * harmonic
        if np.all(term * harmonic < _EPS * tail):
            break
    return -(np.log(0.5 * x) + EULER_GAMMA) * i0 + tail


def _k0_steed(x):
    # Temme's CF2 via Steed's algorithm, order zero; iterate until every lane converges.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    done = np.zeros(x.shape, dtype=bool)
    for i in range(2, _MAXIT):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = np.where(done, 0.0, (b * d - 1.0) * delh)
        dels = q * delh
        s = s + dels
        done |= np.abs(dels / s) < _EPS
        if done.all():
            break
    return np.sqrt(np.pi / (2.0 * x)) * np.exp(-x) / s


def k0(x):
    """Modified Bessel function K0 on a float array (x > 0, checked by caller)."""
    arr = np.asarray(x, dtype=np.float64)
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    small = flat < 2.0
    if small.any():
        out[small] = _k0_series(flat[small])
    if (~small).any():
        out[~small] = _k0_steed(flat[~small])
    return out.reshape(arr.shape)


def _f_mu(mu):
    m2 = mu * mu
    num = 10206.0 + m2 * (21303.0 + m2 * (15399.0 + m2 * (4644.0 + m2 * 496.0)))
    d = 3.0 + m2
    e = 9.0 + 4.0 * m2
    return mu * num / (15.0 * d * d * d * e * e)


def ensemble_row_sums(mu):
    """Row sums of cubic(mu), mu*f(mu) and log sqrt(1+mu^2/3) for a 2-D array."""
    m = np.asarray(mu, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("mu must be two-dimensional")
    m2 = m * m
    out = np.empty((m.shape[0], 3))
    out[:, 0] = (4.0 * m2 * m / (15.0 * (3.0 + m2))).sum(axis=1)
    out[:, 1] = (m * _f_mu(m)).sum(axis=1)
    out[:, 2] = (0.5 * np.log1p(m2 / 3.0)).sum(axis=1)
    return out
