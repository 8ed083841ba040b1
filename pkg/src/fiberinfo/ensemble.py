"""Gaussian input ensemble of two imaginary-time oscillators and its dispersion-correction curves.

P_X[X] ~ exp(-(m/2) int (|X'|^2 + Omega^2 |X|^2) dt) on [-T/2, T/2] with X(+-T/2) = 0.
The power constraint fixes the dimensionless root xi of 2 xi coth(2 xi) = 3,
with 2 xi = Omega T and m Omega = 1/(xi P).

Time averages of a function g of mu = gamma L |X|^2 reduce to one Bessel-K0 integral:
    int dt/T <g(mu)> = (sh/(2 xi)) int_0^inf g(gt xi sh u) K0(u) exp(-u ch) du,
with sh, ch = sinh, cosh(2 xi) and gt = gamma L P.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import scipy.fft

from . import kernels
from .errors import QuadratureError
from .information import EnsembleAverager, Estimate
from .propagation import ChannelParams
from .quadrature import integrate
from .rng import streams
from .special import (bessel_k0, cubic_term, cubic_term_prime, log_jacobian_density, mu_f_mu,
                      mu_f_mu_prime)


def xi_residual(xi: float) -> float:
    return 3.0 - 2.0 * xi / np.tanh(2.0 * xi)


def solve_xi(tol: float = 1e-15) -> float:
    """Root of 2 xi coth(2 xi) = 3 by bisection on [0.1, 10]; 2 xi coth 2 xi is increasing."""
    lo, hi = 0.1, 10.0
    while hi - lo > tol * lo:
        mid = 0.5 * (lo + hi)
        if xi_residual(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


XI = solve_xi()
_SH = np.sinh(2.0 * XI)
_CH = np.cosh(2.0 * XI)


@dataclass(frozen=True)
class OscillatorEnsemble:
    """Discrete oscillator ensemble on M intervals of [-T/2, T/2]; sample j sits at t = -T/2 + j T/M."""

    P: float
    T: float
    M: int
    xi: float = field(default=XI)

    def __post_init__(self):
        if not (self.P > 0 and self.T > 0):
            raise ValueError("P and T must be positive")
        if self.M < 3:
            raise ValueError("need M >= 3")

    @property
    def Omega(self) -> float:
        return 2.0 * self.xi / self.T

    @property
    def m(self) -> float:
        return 1.0 / (self.xi * self.P * self.Omega)

    @property
    def dt(self) -> float:
        return self.T / self.M

    @cached_property
    def nu(self) -> np.ndarray:
        """nu_alpha = (4/dt^2) sin^2(pi alpha/(2M)), alpha = 1..M-1."""
        a = np.arange(1, self.M)
        return 4.0 / self.dt**2 * np.sin(np.pi * a / (2 * self.M)) ** 2

    @cached_property
    def Q_eigs(self) -> np.ndarray:
        return self.m * self.dt * (self.nu + self.Omega**2)

    @property
    def W_X(self) -> float:
        return float(np.sqrt(bandwidth_discrete(self)))

    def coarse(self, M_d: int) -> "OscillatorEnsemble":
        return OscillatorEnsemble(self.P, self.T, M_d, self.xi)


def correlator(t, s, ens: OscillatorEnsemble):
    """<a(t) a(s)> = sh(Omega(T/2+min)) sh(Omega(T/2-max)) / (m Omega sh(Omega T))."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    lo, hi = np.minimum(t, s), np.maximum(t, s)
    W, h = ens.Omega, 0.5 * ens.T
    return np.sinh(W * (h + lo)) * np.sinh(W * (h - hi)) / (ens.m * W * np.sinh(W * ens.T))


def oscillator_eigs(ens: OscillatorEnsemble):
    """(nu_alpha, V) with V[alpha-1, j-1] = sqrt(2/M) sin(pi j alpha/M) for interior samples j."""
    a = np.arange(1, ens.M)
    V = np.sqrt(2.0 / ens.M) * np.sin(np.pi * np.outer(a, a) / ens.M)
    return ens.nu.copy(), V


def Q_inverse(ens: OscillatorEnsemble) -> np.ndarray:
    """Covariance of the interior samples of a (and of b): sum_alpha v v^T / Q_alpha."""
    _, V = oscillator_eigs(ens)
    return (V.T / ens.Q_eigs) @ V


def dtd_matrix(M: int, dt: float) -> np.ndarray:
    """Tridiagonal D^T D on the M-1 interior samples with Dirichlet ends."""
    n = M - 1
    return (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / dt**2


def _quadrature_draws(ens: OscillatorEnsemble, z: np.ndarray) -> np.ndarray:
    # sum_alpha c_alpha sqrt(2/M) sin(pi j alpha/M) = sqrt(2/M) * dst1(c)/2
    c = z / np.sqrt(ens.Q_eigs)
    interior = 0.5 * np.sqrt(2.0 / ens.M) * scipy.fft.dst(c, type=1, axis=-1)
    out = np.zeros(z.shape[:-1] + (ens.M,))
    out[..., 1:] = interior
    return out


def sample(ens: OscillatorEnsemble, rng: np.random.Generator) -> np.ndarray:
    """One realization X = a + i b on the M-point periodic grid; X[0] (t = -T/2) is exactly zero."""
    z = rng.standard_normal((2, ens.M - 1))
    ab = _quadrature_draws(ens, z)
    return ab[0] + 1j * ab[1]


def sample_batch(ens: OscillatorEnsemble, n: int, seed: int, start: int = 0) -> np.ndarray:
    """n realizations from independent counter-based streams (seed, start + k)."""
    z = np.stack([g.standard_normal((2, ens.M - 1)) for g in streams(seed, start, n)])
    ab = _quadrature_draws(ens, z)
    return ab[:, 0] + 1j * ab[:, 1]


def bandwidth_discrete(ens: OscillatorEnsemble) -> float:
    """W_X^2 = 2(M-1)/(m P T) - (2 Omega^2/(m P T)) sum 1/(nu + Omega^2); grows linearly with M."""
    mPT = ens.m * ens.P * ens.T
    return float(2.0 * (ens.M - 1) / mPT - 2.0 * ens.Omega**2 / mPT * np.sum(1.0 / (ens.nu + ens.Omega**2)))


def entropy_HX(ens: OscillatorEnsemble) -> float:
    """Differential entropy sum_alpha ln(2 pi e / Q_alpha) of both quadratures."""
    return float(np.sum(np.log(2.0 * np.pi * np.e / ens.Q_eigs)))


# ---------------------------------------------------------------- kernel integrals

_GEOMETRIC = np.logspace(-20, 0, 81)


def _kernel_weight(u):
    return bessel_k0(u) * np.exp(-u * _CH)


def _u_max(g: Callable, c: float) -> float:
    # pointwise bound sqrt(pi/(2u)) exp(-u(1+ch)) |g(c u)| against the partial integral
    u = np.arange(1.0, 200.0, 0.5)
    bound = np.sqrt(np.pi / (2 * u)) * np.exp(-u * (1 + _CH)) * np.abs(g(c * u))
    vals = bound * 0.5
    running = np.cumsum(vals) + 1e-300
    below = np.nonzero(bound < 1e-16 * running)[0]
    return float(u[below[0]] + 1.0) if below.size else 200.0


def kernel_integral(g: Callable, c: float, refine: int = 1, rtol: float = 1e-12) -> float:
    """int_0^inf g(c u) K0(u) exp(-u ch) du, truncated where the tail bound is negligible.

    ``refine`` splits every starting panel into that many pieces (node doubling uses 2).
    """
    if c == 0.0:
        return float(g(np.zeros(1))[0]) * _k0_weight_integral()
    umax = _u_max(g, c)
    edges = np.unique(np.concatenate([_GEOMETRIC, np.arange(1.0, umax + 0.5, 0.5)]))
    if 0 < 1.0 / c < umax:
        edges = np.unique(np.concatenate([edges, [1.0 / c]]))
    if refine > 1:
        frac = np.arange(refine) / refine
        edges = np.concatenate([(edges[:-1, None] + np.diff(edges)[:, None] * frac).ravel(), edges[-1:]])
    res = integrate(lambda u: g(c * u) * _kernel_weight(u), edges, rtol=rtol)
    return res.value


def _k0_weight_integral() -> float:
    # int_0^inf K0(u) exp(-u ch) du = arccosh(ch)/sinh(arccosh ch) = 2 xi / sh
    return 2.0 * XI / _SH


def time_average(g: Callable, gt: float, refine: int = 1) -> float:
    """int dt/T <g(mu)> over the oscillator ensemble at gamma L P = gt."""
    if gt < 0:
        raise ValueError("gamma-tilde must be non-negative")
    return _SH / (2.0 * XI) * kernel_integral(g, gt * XI * _SH, refine)


def time_average_dgt(gprime: Callable, gt: float, refine: int = 1) -> float:
    """d/d(gt) of :func:`time_average`, from the derivative ``gprime`` of g; gt > 0."""
    if not gt > 0:
        raise ValueError("derivative needs gamma-tilde > 0")
    # d/dgt g(gt xi sh u) = xi sh u g'(.) = (m/gt) g'(m) at m = gt xi sh u
    return _SH / (2.0 * XI) * kernel_integral(lambda m: m / gt * gprime(m), gt * XI * _SH, refine)


def curve_Id(gt: float, refine: int = 1) -> float:
    """I_d = (1/12) int dt/T <4 mu^3/(15(3+mu^2))>."""
    if gt == 0:
        return 0.0
    return time_average(cubic_term, gt, refine) / 12.0


def curve_IX(gt: float, refine: int = 1) -> float:
    """I_X = 2 gt int dt/T <mu f(mu)>, the W_X^2-normalized average of f(mu) mu'^2."""
    if gt == 0:
        return 0.0
    return 2.0 * gt * time_average(mu_f_mu, gt, refine)


def curve_Id_prime(gt: float, refine: int = 1) -> float:
    return time_average_dgt(cubic_term_prime, gt, refine) / 12.0


def curve_IX_prime(gt: float, refine: int = 1) -> float:
    return 2.0 * time_average(mu_f_mu, gt, refine) + 2.0 * gt * time_average_dgt(mu_f_mu_prime, gt, refine)


def curve_Id_y(gt: float) -> float:
    """I_d in the y-integration form (2/15) xi^2 gt^3 int y^3 K0(y/sh) e^{-y coth}/(3 + (gt xi y)^2) dy / 12."""
    if gt == 0:
        return 0.0
    f = lambda y: y**3 * bessel_k0(y / _SH) * np.exp(-y * _CH / _SH) / (3.0 + (gt * XI * y) ** 2)
    edges = np.unique(np.concatenate([_GEOMETRIC * _SH, np.arange(_SH, 60.0 * _SH, 0.5 * _SH)]))
    return (2.0 / 15.0) * XI**2 * gt**3 * integrate(f, edges).value / 12.0


def curve_IX_y(gt: float) -> float:
    """I_X in the y-integration form gt^2 int y f(gt xi y) K0(y/sh) e^{-y coth} dy."""
    from .special import f_mu

    if gt == 0:
        return 0.0
    f = lambda y: y * f_mu(gt * XI * y) * bessel_k0(y / _SH) * np.exp(-y * _CH / _SH)
    edges = np.unique(np.concatenate([_GEOMETRIC * _SH, np.arange(_SH, 60.0 * _SH, 0.5 * _SH),
                                      [1.0 / (gt * XI)]]))
    return gt**2 * integrate(f, edges).value


def curve_G(gt: float, v: float) -> float:
    """G = v^2 I_d - I_X."""
    if not v > 0:
        raise ValueError("v must be positive")
    return v * v * curve_Id(gt) - curve_IX(gt)


@dataclass(frozen=True)
class Curve:
    gamma: np.ndarray
    Id: np.ndarray
    IX: np.ndarray
    v: tuple = ()

    def G(self, v: float) -> np.ndarray:
        return v * v * self.Id - self.IX


def curves(gammas, v_list=()) -> Curve:
    g = np.asarray(gammas, dtype=float)
    return Curve(g, np.array([curve_Id(x) for x in g]), np.array([curve_IX(x) for x in g]), tuple(v_list))


# ---------------------------------------------------------------- thresholds

@dataclass(frozen=True)
class Threshold:
    value: float
    raw: tuple          # estimates at the sample points
    extrapolated: tuple  # successive Richardson values
    spread: float        # relative disagreement of the last two extrapolations


def _richardson(values, ratio):
    v = np.asarray(values, dtype=float)
    return tuple((ratio * v[1:] - v[:-1]) / (ratio - 1.0))


def _threshold(raw, ratio, what):
    ext = _richardson(raw, ratio)
    spread = abs(ext[-1] - ext[-2]) / abs(ext[-1])
    if spread > 0.01:
        raise QuadratureError(f"{what} extrapolation disagrees by {spread:.2%}")
    return Threshold(float(ext[-1]), tuple(raw), ext, float(spread))


def threshold_r1(ys=(1e-3, 5e-4, 2.5e-4)) -> Threshold:
    """sqrt((I_X/y^2)' / (I_d/y^3)) as y -> 0, Richardson-extrapolated in y^2."""
    raw = []
    for y in ys:
        num = curve_IX_prime(y) / y**2 - 2.0 * curve_IX(y) / y**3
        raw.append(np.sqrt(num / (curve_Id(y) / y**3)))
    return _threshold(raw, (ys[0] / ys[1]) ** 2, "r1")


def threshold_r2(gs=(1e2, 1e3, 1e4)) -> Threshold:
    """lim sqrt(I_X'/I_d') as gamma-tilde -> infinity, Richardson-extrapolated in 1/gamma-tilde."""
    raw = [np.sqrt(curve_IX_prime(g) / curve_Id_prime(g)) for g in gs]
    return _threshold(raw, gs[1] / gs[0], "r2")


# ---------------------------------------------------------------- averager

def _row_functionals(X: np.ndarray, gamma_L: float, dt: float):
    """Per-realization time averages (1/M) sum_j of cubic, mu f, log-Jacobian and the phase term."""
    mu = gamma_L * np.abs(X) ** 2
    sums = kernels.ensemble_row_sums(np.ascontiguousarray(mu))
    M = X.shape[-1]
    # phase term integrated by parts: [4 mu/(3+mu^2) - 12 mu/(3+mu^2)^2] mu' phi', forward differences
    Xn = np.roll(X, -1, axis=-1)
    w = np.conj(X) * Xn
    mu_n = np.roll(mu, -1, axis=-1)
    mu_mid = 0.5 * (mu + mu_n)
    d = 3.0 + mu_mid**2
    phase = np.where(np.abs(w) > 0, (4 * mu_mid / d - 12 * mu_mid / d**2)
                     * (mu_n - mu) / dt * np.angle(w) / dt, 0.0)
    return sums[:, 0] / M, sums[:, 1] / M, sums[:, 2] / M, phase.mean(axis=-1)


def _mc_estimate(x: np.ndarray) -> Estimate:
    return Estimate(float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size)), "monte-carlo")


def ensemble_averager(ens: OscillatorEnsemble, params: ChannelParams, mode: str = "analytic",
                      N: Optional[int] = None, seed: int = 0, batch: int = 2000,
                      W_X: Optional[float] = None) -> EnsembleAverager:
    """Averages of the mutual-information functionals over the oscillator ensemble.

    Averages of f(mu) mu'^2 use the renormalized substitution of the singular equal-time
    derivative correlator by P W_X^2 / 2, with W_X from :func:`bandwidth_discrete`
    unless given explicitly.
    """
    gt = params.gamma_tilde(ens.P)
    W_X2 = bandwidth_discrete(ens) if W_X is None else float(W_X) ** 2
    M_d = int(round(ens.T * params.W_d / (2.0 * np.pi)))
    H = Estimate(entropy_HX(ens.coarse(M_d)), 0.0, "analytic")
    if mode == "analytic":
        av = {
            "log_jacobian": Estimate(time_average(log_jacobian_density, gt), 0.0, "analytic"),
            "cubic": Estimate(time_average(cubic_term, gt), 0.0, "analytic"),
            "f_mu_dot2": Estimate(W_X2 * curve_IX(gt), 0.0, "analytic"),
            "phase": Estimate(0.0, 0.0, "analytic"),
            "H_X": H,
        }
        return EnsembleAverager(av, T=ens.T, W_X=np.sqrt(W_X2))
    if mode not in ("monte-carlo", "mc"):
        raise ValueError(f"unknown mode {mode!r}")
    if N is None or N < 100:
        raise ValueError("Monte Carlo mode needs N >= 100 samples")
    parts = [[], [], [], []]
    gamma_L = params.gamma * params.L
    for start in range(0, N, batch):
        X = sample_batch(ens, min(batch, N - start), seed, start)
        for acc, val in zip(parts, _row_functionals(X, gamma_L, ens.dt)):
            acc.append(val)
    cub, muf, jac, ph = (np.concatenate(p) for p in parts)
    av = {
        "log_jacobian": _mc_estimate(jac),
        "cubic": _mc_estimate(cub),
        "f_mu_dot2": _mc_estimate(2.0 * gt * W_X2 * muf),
        "phase": _mc_estimate(ph),
        "H_X": H,
    }
    return EnsembleAverager(av, T=ens.T, W_X=np.sqrt(W_X2))
