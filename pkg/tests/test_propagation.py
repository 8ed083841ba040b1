import warnings

import numpy as np
import pytest

from fiberinfo.errors import DomainError, PerturbativeWarning
from fiberinfo.grid import ComplexSignal, GridSpec, dft
from fiberinfo.propagation import (ChannelParams, gaussian_pulse, noise_sigma2, phi0, phi1, propagate_batch,
                                   relative_energy_drift, sample_noise, spectrum_phase_rotation,
                                   split_step_propagate)
from fiberinfo.rng import stream, streams
from fiberinfo.validate import phi1_residual


def test_params_validation(grid):
    with pytest.raises(ValueError):
        ChannelParams(0.0, 1.0, 0.0, 1.0, grid.W_prime, grid.W_d)
    with pytest.raises(ValueError):
        ChannelParams(0.0, 1.0, 1.0, 0.0, grid.W_prime, grid.W_d)
    with pytest.raises(ValueError):
        ChannelParams(0.0, 1.0, 1.0, 1.0, grid.W_d, grid.W_prime)


def test_perturbative_gate(grid):
    p = ChannelParams(0.4 / grid.W_d**2, 1.0, 1.0, 1.0, grid.W_prime, grid.W_d)
    with pytest.warns(PerturbativeWarning):
        p.check_perturbative()
    with pytest.raises(DomainError):
        p.with_beta(0.6 / grid.W_d**2).check_perturbative()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        p.with_beta(0.05 / grid.W_d**2).check_perturbative()


def test_gaussian_pulse_vanishes_at_edges(grid):
    X = gaussian_pulse(grid, 1.0, 20.0)
    assert X.samples[0] == 0.0
    assert np.max(np.abs(X.samples)) == pytest.approx(np.sqrt(2.0), rel=1e-6)


def test_zero_dispersion_matches_phi0(pulse, params):
    out = split_step_propagate(pulse, params.with_beta(0.0), 20).output
    np.testing.assert_allclose(out.samples, phi0(pulse, params.L, params.gamma).samples, atol=1e-13)


def test_linear_channel_matches_spectral_rotation(pulse, grid):
    p = ChannelParams(1e-5, 0.0, 1.0, 1.0, grid.W_prime, grid.W_d)
    out = split_step_propagate(pulse, p, 3).output
    np.testing.assert_allclose(out.samples, spectrum_phase_rotation(pulse, p), atol=1e-12)


def test_rotation_direction(grid):
    # a single positive bin picks up exp(+i beta w^2 L)
    t = grid.times()
    w = 2 * np.pi * 4 / grid.T
    p = ChannelParams(1e-4, 0.0, 1.0, 1.0, grid.W_prime, grid.W_d)
    x = ComplexSignal(grid, np.exp(1j * w * t))
    out = split_step_propagate(x, p, 1).output.samples
    np.testing.assert_allclose(out, x.samples * np.exp(1j * p.beta * w * w), atol=1e-12)


def test_noiseless_energy_conserved(pulse, params):
    res = split_step_propagate(pulse, params, 200)
    assert relative_energy_drift(res, pulse) < 1e-12


@pytest.mark.parametrize("frac", [0.3, 0.8])
def test_phi1_solves_first_order_equation(pulse, params, frac):
    assert phi1_residual(pulse, params, frac * params.L, 1e-4 * params.L) < 1e-6


def test_phi1_linear_in_beta(pulse, params):
    a = phi1(pulse, params.L, params).samples
    b = phi1(pulse, params.L, params.with_beta(3 * params.beta)).samples
    np.testing.assert_allclose(b, 3 * a, rtol=1e-12, atol=1e-20)
    assert not np.any(phi1(pulse, params.L, params.with_beta(0.0)).samples)


def test_split_step_first_order_agreement(pulse, params):
    out = split_step_propagate(pulse, params, 500).output.samples
    p0 = phi0(pulse, params.L, params.gamma).samples
    p1 = phi1(pulse, params.L, params).samples
    assert np.linalg.norm(out - p0 - p1) / np.linalg.norm(p1) < 0.05


def test_noise_variance(small_grid):
    dz = 0.01
    s2 = noise_sigma2(small_grid, 2e-3, dz)
    assert s2 == pytest.approx(2e-3 / (small_grid.dt * dz))
    draws = np.stack([sample_noise(small_grid, 2e-3, dz, stream(3, k)).samples for k in range(400)])
    assert np.mean(np.abs(draws) ** 2) / s2 == pytest.approx(1.0, abs=0.03)
    # circular: no pseudo-covariance
    assert abs(np.mean(draws**2)) / s2 < 0.03
    # white: each fine bin carries sigma^2/M
    spec = np.mean(np.abs(dft(draws)) ** 2, axis=0) * small_grid.M / s2
    assert spec.mean() == pytest.approx(1.0, abs=0.03)


def test_noisy_propagation_variance_linear_channel(small_grid):
    # with gamma = beta = 0 the output deviation is the integrated noise: Var = Q L / dt
    p = ChannelParams(0.0, 0.0, 1.0, 1e-6, small_grid.W_prime, small_grid.W_d)
    out, _ = propagate_batch(np.zeros((200, small_grid.M)), small_grid, p, 10, streams(1, 0, 200))
    assert np.mean(np.abs(out) ** 2) / (p.Q * p.L / small_grid.dt) == pytest.approx(1.0, abs=0.02)


def test_batch_independent_of_grouping(small_grid):
    p = ChannelParams(1e-6, 1.0, 1.0, 1e-6, small_grid.W_prime, small_grid.W_d)
    x0 = np.ones((4, small_grid.M))
    a, _ = propagate_batch(x0, small_grid, p, 5, streams(9, 0, 4))
    b1, _ = propagate_batch(x0[:2], small_grid, p, 5, streams(9, 0, 2))
    b2, _ = propagate_batch(x0[2:], small_grid, p, 5, streams(9, 2, 2))
    np.testing.assert_allclose(a, np.concatenate([b1, b2]), atol=1e-15)


def test_propagation_argument_checks(small_grid):
    p = ChannelParams(0.0, 1.0, 1.0, 1e-6, small_grid.W_prime, small_grid.W_d)
    with pytest.raises(ValueError):
        propagate_batch(np.ones((1, 5)), small_grid, p, 1)
    with pytest.raises(ValueError):
        propagate_batch(np.ones((2, small_grid.M)), small_grid, p, 1, streams(0, 0, 1))
    with pytest.raises(ValueError):
        propagate_batch(np.ones((1, small_grid.M)), small_grid, p, 0)
    with pytest.raises(ValueError):
        sample_noise(small_grid, 1.0, 0.0, stream(0, 0))


def test_phi0_preserves_modulus(pulse):
    for z in (0.0, 0.4, 3.0):
        np.testing.assert_allclose(np.abs(phi0(pulse, z, 2.0).samples), np.abs(pulse.samples), rtol=1e-15)


def test_split_step_second_order_in_dz(pulse, params):
    p = params.with_beta(20 * params.beta)
    ref = split_step_propagate(pulse, p, 1600).output.samples
    errs = [np.linalg.norm(split_step_propagate(pulse, p, n).output.samples - ref) for n in (50, 100)]
    assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.2)


def test_long_run_energy_drift(pulse, params):
    assert relative_energy_drift(split_step_propagate(pulse, params, 1000), pulse) < 1e-10


def test_noise_increments_independent_across_steps(small_grid):
    # with beta = gamma = 0 each step adds only its noise draw; a one-step run over L/2 replays
    # the first step of a two-step run over L (same dz, same leading draws of each stream)
    N = 4000
    full = ChannelParams(0.0, 0.0, 1.0, 1e-6, small_grid.W_prime, small_grid.W_d)
    half = ChannelParams(0.0, 0.0, 0.5, 1e-6, small_grid.W_prime, small_grid.W_d)
    zero = np.zeros((N, small_grid.M))
    one, _ = propagate_batch(zero, small_grid, half, 1, streams(4, 0, N))
    two, _ = propagate_batch(zero, small_grid, full, 2, streams(4, 0, N))
    first, second = one[:, 0], two[:, 0] - one[:, 0]
    c = np.mean(first * np.conj(second)) / np.sqrt(np.mean(np.abs(first) ** 2) * np.mean(np.abs(second) ** 2))
    assert abs(c) < 4 / np.sqrt(N)
