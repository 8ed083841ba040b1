import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fiberinfo.errors import QuadratureError
from fiberinfo.green import ZPoly, forcing, green_GF, green_GFbar, kappa1
from fiberinfo.grid import GridSpec
from fiberinfo.propagation import ChannelParams
from fiberinfo.validate import _kappa1_case, check_kappa1

L = 2.0
mus = st.floats(0.0, 20.0, allow_nan=False)
points = st.floats(0.05, 0.95, allow_nan=False)


@given(mus, points)
def test_green_continuity_and_jump(mu, frac):
    zp = frac * L
    h = 1e-7 * L
    for G in (green_GF, green_GFbar):
        assert abs(G(zp - h, zp, mu, L) - G(zp + h, zp, mu, L)) < 1e-6 * (1 + mu**3)
    d = lambda G, z: (G(z + h, zp, mu, L) - G(z - h, zp, mu, L)) / (2 * h)
    jump_F = d(green_GF, zp + 3 * h) - d(green_GF, zp - 3 * h)
    jump_Fbar = d(green_GFbar, zp + 3 * h) - d(green_GFbar, zp - 3 * h)
    # kappa1 = -L int G F dz' with a unit jump in dk/dz requires dG/dz to jump by -1/L
    assert abs(jump_F + 1.0 / L) < 1e-4 * (1 + mu**3)
    assert abs(jump_Fbar) < 1e-4 * (1 + mu**3)


@given(mus, points)
def test_green_boundary_zeros(mu, frac):
    zp = frac * L
    for G in (green_GF, green_GFbar):
        assert G(0.0, zp, mu, L) == 0
        assert abs(G(L, zp, mu, L)) < 1e-15


def test_green_pair_solves_homogeneous_system():
    mu, zp = 1.7, 0.6 * L
    nu = mu / L
    h = 1e-4
    G = lambda z: green_GF(z, zp, mu, L)
    H = lambda z: green_GFbar(z, zp, mu, L)
    for z in (0.3, 1.6):
        d1 = lambda f: (f(z + h) - f(z - h)) / (2 * h)
        d2 = lambda f: (f(z + h) - 2 * f(z) + f(z - h)) / h**2
        r1 = d2(G) - 2j * nu * d1(G) - 2 * nu**2 * (G(z) + np.conj(H(z)))
        r2 = d2(H) - 2j * nu * d1(H) - 2 * nu**2 * (H(z) + np.conj(G(z)))
        assert abs(r1) < 1e-5 and abs(r2) < 1e-5


coef = arrays(np.float64, (3, 4), elements=st.floats(-5, 5, allow_nan=False))


@given(coef, coef, st.floats(-2, 2, allow_nan=False))
def test_zpoly_algebra_matches_pointwise(a, b, z):
    p, q = ZPoly(a + 0.5j * a[::-1]), ZPoly(b)
    pv, qv = p(z), q(z)
    np.testing.assert_allclose((p * q)(z), pv * qv, atol=1e-9 * (1 + abs(pv * qv).max()))
    np.testing.assert_allclose((p + q)(z), pv + qv, atol=1e-12 * (1 + abs(pv).max() + abs(qv).max()))
    np.testing.assert_allclose((p - 2.0 * q)(z), pv - 2 * qv, atol=1e-12 * (1 + abs(pv).max() + abs(qv).max()))
    np.testing.assert_allclose(p.conj()(z), np.conj(pv), atol=1e-12 * (1 + abs(pv).max()))
    np.testing.assert_allclose(p.real(z) + 1j * p.imag(z), pv, atol=1e-12 * (1 + abs(pv).max()))
    h = 1e-6
    np.testing.assert_allclose(p.dz()(z), (p(z + h) - p(z - h)) / (2 * h), atol=1e-5 * (1 + abs(pv).max()))


def test_ndarray_times_zpoly_dispatches():
    p = ZPoly.monomials(np.ones(3), np.ones(3))
    out = np.array([1.0, 2.0, 3.0]) * p
    assert isinstance(out, ZPoly)
    np.testing.assert_allclose(out(2.0), [3.0, 6.0, 9.0])


_GRID = GridSpec(1.0, 256, 16)


def _params(beta=5e-7):
    return ChannelParams(beta, 1.0, 1.0, 1e-6, _GRID.W_prime, _GRID.W_d)


def test_kappa1_vanishes_without_dispersion():
    p = _params()
    X, Y = _kappa1_case(_GRID, p, 20.0, 0)
    p0 = p.with_beta(0.0)
    assert np.max(np.abs(forcing(X, Y, p0)(np.linspace(0, 1, 5)))) == 0
    res = kappa1(X, Y, p0, n_z=11)
    assert np.max(np.abs(res.values)) == 0


def test_kappa1_endpoints_and_residual():
    checks = check_kappa1(_GRID, _params(), 20.0, seed=1, n_z=201)
    for c in checks:
        assert c.passed, c


def test_kappa1_quadrature_guard():
    p = _params()
    X, Y = _kappa1_case(_GRID, p, 20.0, 0)
    with pytest.raises(ValueError):
        kappa1(X, Y, p, n_quad=8)
    with pytest.raises(QuadratureError):
        kappa1(X, Y, p, n_z=11, rtol=-1.0)  # a negative tolerance can never be met
