"""Polar decomposition X = rho exp(i phi) of an input envelope and its time derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSignalError
from .grid import ComplexSignal, avg_power, derivative_array

# Relative floor for |X| in divisions, as a fraction of sqrt(P).
RHO_FLOOR = 1e-8


@dataclass(frozen=True)
class EnvelopeDecomposition:
    """rho, phi, mu = gamma L rho^2 and their first two time derivatives on one grid."""

    rho: np.ndarray
    phi: np.ndarray
    mu: np.ndarray
    rho_dot: np.ndarray
    rho_ddot: np.ndarray
    phi_dot: np.ndarray
    phi_ddot: np.ndarray
    mu_dot: np.ndarray
    mu_ddot: np.ndarray
    rho_floor: float

    def subsample(self, step: int) -> "EnvelopeDecomposition":
        """Values at every ``step``-th sample (fine -> coarse times)."""
        kw = {k: getattr(self, k)[::step] for k in (
            "rho", "phi", "mu", "rho_dot", "rho_ddot", "phi_dot", "phi_ddot", "mu_dot", "mu_ddot")}
        return EnvelopeDecomposition(rho_floor=self.rho_floor, **kw)

    def inv_rho(self) -> np.ndarray:
        """Regularized 1/rho, equal to rho / max(rho^2, floor^2)."""
        return self.rho / np.maximum(self.rho**2, self.rho_floor**2)


def decompose_array(x: np.ndarray, T: float, gamma_L: float, power: float | None = None) -> EnvelopeDecomposition:
    """Decompose periodic samples ``x`` on a window of length T.

    Derivatives of rho and phi follow from exact spectral derivatives of X:
    rho' = Re(conj(X) X')/rho, phi' = Im(conj(X) X')/rho^2, and the second
    derivatives from X'' exp(-i phi) = rho'' - rho phi'^2 + i(2 rho' phi' + rho phi'').
    |X| and arg X themselves are not band-limited, so they are never differentiated directly.
    """
    x = np.asarray(x, dtype=np.complex128)
    if power is None:
        power = float(np.mean(np.abs(x) ** 2))
    floor = RHO_FLOOR * np.sqrt(power) if power > 0 else RHO_FLOOR
    rho = np.abs(x)
    interior = rho[1:]
    if power == 0 or np.mean(interior < floor) > 0.5:
        raise DegenerateSignalError("|X| is below the floor on more than half of the interior samples")
    phi = np.unwrap(np.angle(x))
    xd = derivative_array(x, T, 1)
    xdd = derivative_array(x, T, 2)
    r2 = np.maximum(rho**2, floor**2)
    inv_rho = rho / r2
    cross = np.conj(x) * xd
    rho_dot = cross.real * inv_rho
    phi_dot = cross.imag / r2
    second = np.conj(x) * xdd * inv_rho  # = X'' exp(-i phi)
    rho_ddot = second.real + rho * phi_dot**2
    phi_ddot = (second.imag - 2.0 * rho_dot * phi_dot) * inv_rho
    mu = gamma_L * rho**2
    mu_dot = 2.0 * gamma_L * cross.real
    mu_ddot = 2.0 * gamma_L * (np.abs(xd) ** 2 + (np.conj(x) * xdd).real)
    return EnvelopeDecomposition(rho, phi, mu, rho_dot, rho_ddot, phi_dot, phi_ddot, mu_dot, mu_ddot, floor)


def decompose(X: ComplexSignal, params) -> EnvelopeDecomposition:
    """Envelope decomposition of ``X`` for channel parameters ``params`` (uses gamma*L)."""
    return decompose_array(X.samples, X.grid.T, params.gamma * params.L, avg_power(X))
