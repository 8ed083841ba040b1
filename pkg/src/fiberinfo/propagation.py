"""Noiseless perturbative solution and stochastic split-step propagation of the NLSE.

The channel is  dpsi/dz + i beta d^2psi/dt^2 - i gamma |psi|^2 psi = eta(z, t),
with circular white noise of spectral density Q per unit length, confined to
|w| <= W'/2:  <eta(z,w) conj(eta(z',w'))> = 2 pi Q delta(w-w') delta(z-z').
Q is read per unit *angular* frequency; multiply by ``Q_PER_HZ`` to convert.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .envelope import decompose
from .errors import DivergenceError, DomainError, PerturbativeWarning
from .grid import ComplexSignal, GridSpec, avg_power, dft, idft

# Q per unit angular frequency -> per Hz.
Q_PER_HZ = 2.0 * np.pi

GATE_HARD = 0.5
GATE_WARN = 0.1


@dataclass(frozen=True)
class ChannelParams:
    """Fiber parameters in SI units; bandwidths are angular (rad/s)."""

    beta: float
    gamma: float
    L: float
    Q: float
    W_prime: float
    W_d: float

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if not self.Q > 0:
            raise ValueError("Q must be positive")
        if not 0 < self.W_d <= self.W_prime * (1 + 1e-12):
            raise ValueError("need 0 < W_d <= W'")

    def dispersion_group(self, W: float) -> float:
        """|beta| L W^2 for a bandwidth W."""
        return abs(self.beta) * self.L * W * W

    def gamma_tilde(self, P: float) -> float:
        return self.gamma * self.L * P

    def check_perturbative(self, W_X: Optional[float] = None) -> None:
        """Hard gate at |beta| L W^2 >= 0.5 for W_d (and W_X if given); warn above 0.1."""
        groups = {"beta*L*W_d^2": self.dispersion_group(self.W_d)}
        if W_X is not None:
            groups["beta*L*W_X^2"] = self.dispersion_group(W_X)
        for name, value in groups.items():
            if value >= GATE_HARD:
                raise DomainError(f"{name} = {value:.3g} is outside the perturbative range (< {GATE_HARD})")
            if value > GATE_WARN:
                warnings.warn(f"{name} = {value:.3g} exceeds {GATE_WARN}; first-order results degrade",
                              PerturbativeWarning, stacklevel=2)

    def with_beta(self, beta: float) -> "ChannelParams":
        return ChannelParams(beta, self.gamma, self.L, self.Q, self.W_prime, self.W_d)


@dataclass(frozen=True)
class PropagationResult:
    output: ComplexSignal
    energy: np.ndarray  # int |psi|^2 dt after each step


def phi0(X: ComplexSignal, z: float, gamma: float) -> ComplexSignal:
    """Zero-dispersion solution X exp(i gamma z |X|^2)."""
    x = X.samples
    return X.replace(x * np.exp(1j * gamma * z * np.abs(x) ** 2))


def phi1(X: ComplexSignal, z: float, params: ChannelParams) -> ComplexSignal:
    """First-order-in-beta correction to the noiseless field at distance z."""
    if params.beta == 0.0:
        return X.replace(np.zeros(len(X)))
    env = decompose(X, params)
    return X.replace(phi1_from_env(env, z, params))


def phi1_from_env(env, z, params: ChannelParams) -> np.ndarray:
    """Closed-form first-order field; ``z`` may be a scalar or an array broadcast against time."""
    z = np.asarray(z, dtype=float)[..., None] if np.ndim(z) else float(z)
    g = params.gamma
    r, rd, rdd = env.rho, env.rho_dot, env.rho_ddot
    pd, pdd = env.phi_dot, env.phi_ddot
    nu = g * r**2
    rd2_over_r = rd**2 * env.inv_rho()
    real = z * (2 * pd * rd + r * pdd) + z**2 * nu * (rdd + 3 * rd2_over_r)
    imag = (z**3 * nu**2 * (2.0 / 3.0) * (rdd + 5 * rd2_over_r)
            + z**2 * nu * (4 * pd * rd + r * pdd)
            + z * (r * pd**2 - rdd))
    phase = np.exp(1j * (nu * z + env.phi))
    return params.beta * phase * (real + 1j * imag)


def noise_sigma2(grid: GridSpec, Q: float, dz: float) -> float:
    """Per-sample variance E|eta|^2 = Q W' / (2 pi dz) = Q / (dt dz) of the noise field."""
    return Q * grid.W_prime / (2.0 * np.pi * dz)


def _noise_from_normals(normals: np.ndarray, sigma2: float) -> np.ndarray:
    # normals[..., 0, :] and [..., 1, :] are the real/imaginary parts of the DFT coefficients.
    M = normals.shape[-1]
    coeff = (normals[..., 0, :] + 1j * normals[..., 1, :]) * np.sqrt(sigma2 / (2.0 * M))
    return idft(coeff)


def sample_noise(grid: GridSpec, Q: float, dz: float, rng: np.random.Generator) -> ComplexSignal:
    """One z-slab of the noise field eta on the fine grid.

    Every DFT bin of the fine grid lies inside |w| <= W'/2, and each receives an
    independent circular Gaussian coefficient of variance sigma^2/M.
    """
    if not dz > 0:
        raise ValueError("dz must be positive")
    normals = rng.standard_normal((2, grid.M))
    return ComplexSignal(grid, _noise_from_normals(normals, noise_sigma2(grid, Q, dz)), "fine", "noise")


def propagate_batch(
    psi0: np.ndarray,
    grid: GridSpec,
    params: ChannelParams,
    n_steps: int,
    rngs: Optional[Sequence[np.random.Generator]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Strang split-step propagation of a (batch, M) array of launch fields.

    Returns the output fields and the per-step energy log (batch, n_steps).
    Each step is D/2, N/2, noise, N/2, D/2; injecting the noise mid-step makes
    its accumulated covariance a midpoint rule in z. One draw per step comes
    from each realization's own generator.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    psi = np.array(psi0, dtype=np.complex128, ndmin=2)
    B, M = psi.shape
    if M != grid.M:
        raise ValueError("field length does not match the fine grid")
    dz = params.L / n_steps
    w = grid.frequencies("fine")
    half = np.exp(0.5j * params.beta * w * w * dz)
    noisy = rngs is not None
    if noisy:
        if len(rngs) != B:
            raise ValueError("need one generator per realization")
        sigma2 = noise_sigma2(grid, params.Q, dz)
        normals = np.stack([g.standard_normal((n_steps, 2, M)) for g in rngs], axis=1)
    energy = np.empty((B, n_steps))
    linear = params.beta != 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            if linear:
                psi = np.fft.ifft(np.fft.fft(psi, axis=-1) * half, axis=-1)
            psi = psi * np.exp(0.5j * params.gamma * np.abs(psi) ** 2 * dz)
            if noisy:
                psi = psi + _noise_from_normals(normals[k], sigma2) * dz
            psi = psi * np.exp(0.5j * params.gamma * np.abs(psi) ** 2 * dz)
            if linear:
                psi = np.fft.ifft(np.fft.fft(psi, axis=-1) * half, axis=-1)
            power = np.mean(np.abs(psi) ** 2, axis=-1)
            if not np.all(np.isfinite(power)):
                raise DivergenceError(k)
            energy[:, k] = power * grid.T
    return psi, energy


def split_step_propagate(
    X: ComplexSignal,
    params: ChannelParams,
    n_steps: int = 1000,
    rng: Optional[np.random.Generator] = None,
) -> PropagationResult:
    """Propagate one launch field to z = L; ``rng=None`` integrates the noiseless equation."""
    if X.level != "fine":
        raise ValueError("propagation runs on the fine grid")
    out, energy = propagate_batch(X.samples[None, :], X.grid, params, n_steps,
                                  None if rng is None else [rng])
    return PropagationResult(ComplexSignal(X.grid, out[0], "fine", "output"), energy[0])


def gaussian_pulse(grid: GridSpec, P: float, W_X: float) -> ComplexSignal:
    """sqrt(2P) exp(-t^2 W_X^2/2), shifted down so it vanishes exactly at t = +-T/2."""
    t = grid.times("fine")
    edge = np.exp(-((0.5 * grid.T * W_X) ** 2) / 2.0)
    shape = np.clip(np.exp(-(t * W_X) ** 2 / 2.0) - edge, 0.0, None)
    return ComplexSignal(grid, np.sqrt(2.0 * P) * shape, "fine", "input")


def relative_energy_drift(result: PropagationResult, X: ComplexSignal) -> float:
    e0 = avg_power(X) * X.grid.T
    return float(np.max(np.abs(result.energy - e0)) / e0)


def spectrum_phase_rotation(X: ComplexSignal, params: ChannelParams) -> np.ndarray:
    """Linear-channel reference: DFT bins rotated by exp(i beta w^2 L)."""
    w = X.frequencies
    return idft(dft(X) * np.exp(1j * params.beta * w * w * params.L))
