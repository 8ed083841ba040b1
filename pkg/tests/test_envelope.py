import numpy as np
import pytest

from fiberinfo.envelope import RHO_FLOOR, decompose, decompose_array
from fiberinfo.errors import DegenerateSignalError
from fiberinfo.grid import GridSpec


def test_derivatives_of_analytic_envelope():
    g = GridSpec(2 * np.pi, 256, 32)
    t = g.times()
    rho = 1.5 + 0.3 * np.cos(t)
    phi = 0.7 * np.sin(2 * t)
    env = decompose_array(rho * np.exp(1j * phi), g.T, 2.0)
    np.testing.assert_allclose(env.rho, rho, atol=1e-13)
    np.testing.assert_allclose(env.rho_dot, -0.3 * np.sin(t), atol=1e-10)
    np.testing.assert_allclose(env.rho_ddot, -0.3 * np.cos(t), atol=1e-10)
    np.testing.assert_allclose(env.phi_dot, 1.4 * np.cos(2 * t), atol=1e-10)
    np.testing.assert_allclose(env.phi_ddot, -2.8 * np.sin(2 * t), atol=1e-10)
    np.testing.assert_allclose(env.mu, 2.0 * rho**2, atol=1e-12)
    np.testing.assert_allclose(env.mu_dot, 4.0 * rho * env.rho_dot, atol=1e-10)
    np.testing.assert_allclose(env.mu_ddot, 4.0 * (env.rho_dot**2 + rho * env.rho_ddot), atol=1e-9)


def test_phase_sign_follows_inverse_transform():
    g = GridSpec(1.0, 64, 8)
    w = 2 * np.pi * 3
    env = decompose_array(np.exp(-1j * w * g.times()), g.T, 1.0)
    np.testing.assert_allclose(env.phi_dot, -w, rtol=1e-12)


def test_degenerate_signal_rejected():
    x = np.zeros(64, complex)
    x[5:10] = 1.0
    with pytest.raises(DegenerateSignalError):
        decompose_array(x, 1.0, 1.0)
    with pytest.raises(DegenerateSignalError):
        decompose_array(np.zeros(64), 1.0, 1.0)


def test_regularized_inverse_is_finite_at_zeros(pulse, params):
    env = decompose(pulse, params)
    inv = env.inv_rho()
    assert np.all(np.isfinite(inv))
    assert env.rho_floor == pytest.approx(RHO_FLOOR * np.sqrt(np.mean(np.abs(pulse.samples) ** 2)))
    assert np.max(inv) <= 1.0 / env.rho_floor * (1 + 1e-12)


def test_subsample():
    g = GridSpec(1.0, 64, 8)
    env = decompose_array(1.0 + 0.1 * np.exp(2j * np.pi * g.times()), g.T, 1.0)
    sub = env.subsample(8)
    assert sub.mu.shape == (8,)
    np.testing.assert_array_equal(sub.phi_dot, env.phi_dot[::8])
