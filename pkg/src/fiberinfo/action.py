"""Classical action of the noise path integral and the conditional PDF on the coarse grid.

The deviation of the output from the noiseless field is expressed through
x + i y = (Y - Phi(L)) exp(-i phi - i mu); the leading action is a quadratic
form in (x, y) which a per-sample rotation diagonalizes into (y1, y2).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .envelope import EnvelopeDecomposition, decompose
from .errors import PerturbativeWarning
from .grid import ComplexSignal, coarse_array, derivative_array
from .propagation import ChannelParams, phi0, phi1_from_env

MU_CLAMP = 1e-12

__all__ = [
    "EnvelopeDecomposition", "decompose", "kappa0", "CoefficientsA", "coeffs_a",
    "RotationData", "rotation", "CoefficientsB", "coeffs_b", "action0", "action1",
    "action1_xy", "XY", "xy_from_output", "y_to_output", "receiver_coordinates",
    "coarse_coefficients", "LogPdf", "log_cond_pdf", "quadratic_form_matrix",
    "bsum_closed_forms",
]


def kappa0(x, y, mu, z_frac):
    """Leading-order deviation kappa0(z) for endpoint value x + i y.

    Solves  k'' - 2i nu k' - 4 nu^2 Re k = 0  (nu = mu/L, primes in z) with
    k(0) = 0 and k(L) = x + i y; ``z_frac`` = z/L.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    s = np.asarray(z_frac, dtype=float)
    d = 1.0 + mu * mu / 3.0
    u = (mu * x - y) / d
    w = ((1.0 - 2.0 * mu * mu / 3.0) * x + mu * y) / d
    re = (mu * u * s + w) * s
    im = (u * (2.0 * mu * mu * s * s / 3.0 - 1.0) + mu * w * s) * s
    return re + 1j * im


@dataclass(frozen=True)
class CoefficientsA:
    """a1..a11 per time sample; index with ``a[k]`` for k = 1..11."""

    values: np.ndarray  # shape (12, N); row 0 unused

    def __getitem__(self, k: int) -> np.ndarray:
        if not 1 <= k <= 11:
            raise IndexError("coefficients are numbered 1..11")
        return self.values[k]


def coeffs_a(env: EnvelopeDecomposition) -> CoefficientsA:
    """Coefficients of the first-order action in the (x, y) variables."""
    mu, md, mdd = env.mu, env.mu_dot, env.mu_ddot
    pd, pdd = env.phi_dot, env.phi_ddot
    a = np.zeros((12, mu.shape[0]))
    D = 3.0 + mu**2

    # 1/mu prefactors: evaluate the whole rational expression at a clamped mu.
    m = np.maximum(mu, MU_CLAMP)
    Dm = 3.0 + m**2
    a[1] = (90*m**9*pdd + 30*m**9*mdd + 90*m**8*pd**2 + 180*md*m**8*pd + 62*md**2*m**8
            + 1035*m**7*pdd + 288*m**7*mdd + 810*m**6*pd**2 + 2070*md*m**6*pd + 780*md**2*m**6
            + 3645*m**5*pdd + 999*m**5*mdd + 2430*m**4*pd**2 + 7560*md*m**4*pd + 2403*md**2*m**4
            + 3645*m**3*pdd + 810*m**3*mdd + 2430*m**2*pd**2 + 8910*md*m**2*pd + 4590*md**2*m**2
            - 1215*m*pdd - 1215*m*mdd + 405*md**2) / (15*m*Dm**4)
    a[2] = -(30*m**9*pdd + 10*m**9*mdd + 30*m**8*pd**2 + 60*md*m**8*pd + 20*md**2*m**8
             + 315*m**7*pdd + 96*m**7*mdd + 270*m**6*pd**2 + 570*md*m**6*pd + 198*md**2*m**6
             + 1125*m**5*pdd + 315*m**5*mdd + 810*m**4*pd**2 + 1800*md*m**4*pd + 639*md**2*m**4
             + 1485*m**3*pdd + 306*m**3*mdd + 810*m**2*pd**2 + 1890*md*m**2*pd + 1008*md**2*m**2
             + 405*m*pdd - 135*m*mdd + 135*md**2) / (5*m*Dm**4)

    a[3] = (120*mu**9*pdd + 40*mu**9*mdd + 120*mu**8*pd**2 + 240*md*mu**8*pd + 80*md**2*mu**8
            + 1200*mu**7*pdd + 363*mu**7*mdd + 1080*mu**6*pd**2 + 2280*md*mu**6*pd + 792*md**2*mu**6
            + 3780*mu**5*pdd + 1017*mu**5*mdd + 3240*mu**4*pd**2 + 6840*md*mu**4*pd + 2412*md**2*mu**4
            + 3240*mu**3*pdd + 189*mu**3*mdd + 3240*mu**2*pd**2 + 5400*md*mu**2*pd + 3456*md**2*mu**2
            - 1620*mu*pdd - 3240*md*pd - 2025*mu*mdd - 1620*md**2) / (15*D**4)
    a[4] = -2*(30*mu**6*pd + 14*md*mu**6 + 225*mu**4*pd + 99*md*mu**4 + 540*mu**2*pd
               + 135*md + 405*pd) / (15*D**3)
    a[5] = -6*(5*mu**4*pd + 3*md*mu**4 + 30*mu**2*pd + 22*md*mu**2 + 15*md + 45*pd) / (5*D**3)
    a[6] = mu*(20*mu**4*pd + 13*md*mu**4 + 120*mu**2*pd + 102*md*mu**2 + 45*md + 180*pd) / (5*D**3)
    a[7] = mu*(20*mu**4*pd + 11*md*mu**4 + 120*mu**2*pd + 66*md*mu**2 - 45*md + 180*pd) / (5*D**3)
    a[8] = 2*mu*(-45 + 15*mu**2 + 4*mu**4) / (15*D**2)
    a[9] = 6*mu*(5 + mu**2) / (5*D**2)
    a[10] = -(45 + 60*mu**2 + 11*mu**4) / (5*D**2)
    a[11] = -(-45 + mu**4) / (5*D**2)
    return CoefficientsA(a)


def quadratic_form_matrix(mu):
    """2x2 matrix (per sample, shape (2, 2, N)) of the leading action in (x, y), times L."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    d = 1.0 + mu * mu / 3.0
    return np.array([[(1.0 + 4.0 * mu * mu / 3.0) / d, -mu / d], [-mu / d, 1.0 / d]])


@dataclass(frozen=True)
class RotationData:
    """Per-sample receiver rotation.

    u = (x + i y) exp(i theta) has Re u along the alpha1 eigenvector of the
    leading quadratic form; y1 = sqrt(alpha1) Re u, y2 = sqrt(alpha2) Im u;
    (x, y)^T = A (y1, y2)^T. dA and d2A are derivatives with respect to mu.
    """

    mu: np.ndarray
    theta: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    A: np.ndarray
    dA: np.ndarray
    d2A: np.ndarray
    B: np.ndarray | None = None

    def A_dot(self, mu_dot):
        return self.dA * mu_dot

    def A_ddot(self, mu_dot, mu_ddot):
        return self.d2A * mu_dot**2 + self.dA * mu_ddot


def _alpha_and_derivs(mu, sign):
    # alpha = (3 + 2mu^2 + sign*mu*s)/(3 + mu^2), s = sqrt(9 + 4mu^2)
    s = np.sqrt(9.0 + 4.0 * mu * mu)
    n = 3.0 + 2.0 * mu * mu + sign * mu * s
    n1 = 4.0 * mu + sign * (s + 4.0 * mu * mu / s)
    n2 = 4.0 + sign * (12.0 * mu / s - 16.0 * mu**3 / s**3)
    d = 3.0 + mu * mu
    alpha = n / d
    a1 = (n1 * d - n * 2.0 * mu) / d**2
    a2 = (n2 * d - 2.0 * n) / d**2 - 4.0 * mu * (n1 * d - 2.0 * mu * n) / d**3
    return alpha, a1, a2


def rotation(mu, phi=None) -> RotationData:
    """Eigen-rotation of the leading action; B is filled in when ``phi`` is given.

    theta = -pi/4 - arctan(2 mu/3)/2 makes Re u the alpha1 direction; at mu = 0
    it is a rotation by -pi/4.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    theta = -0.25 * np.pi - 0.5 * np.arctan(2.0 * mu / 3.0)
    th1 = -3.0 / (9.0 + 4.0 * mu * mu)
    th2 = 24.0 * mu / (9.0 + 4.0 * mu * mu) ** 2
    al1, al1p, al1pp = _alpha_and_derivs(mu, -1.0)
    al2, al2p, al2pp = _alpha_and_derivs(mu, +1.0)

    def inv_sqrt(al, alp, alpp):
        g = al**-0.5
        g1 = -0.5 * al**-1.5 * alp
        g2 = 0.75 * al**-2.5 * alp**2 - 0.5 * al**-1.5 * alpp
        return g, g1, g2

    g1, g1p, g1pp = inv_sqrt(al1, al1p, al1pp)
    g2, g2p, g2pp = inv_sqrt(al2, al2p, al2pp)
    c, s = np.cos(theta), np.sin(theta)
    cp, sp = -s * th1, c * th1
    cpp, spp = -c * th1**2 - s * th2, -s * th1**2 + c * th2

    A = np.array([[g1 * c, g2 * s], [-g1 * s, g2 * c]])
    dA = np.array([[g1p * c + g1 * cp, g2p * s + g2 * sp],
                   [-(g1p * s + g1 * sp), g2p * c + g2 * cp]])
    d2A = np.array([[g1pp * c + 2 * g1p * cp + g1 * cpp, g2pp * s + 2 * g2p * sp + g2 * spp],
                    [-(g1pp * s + 2 * g1p * sp + g1 * spp), g2pp * c + 2 * g2p * cp + g2 * cpp]])
    B = None
    if phi is not None:
        psi = theta - mu - np.asarray(phi, dtype=float)
        B = np.array([[g1 * np.cos(psi), g2 * np.sin(psi)], [-g1 * np.sin(psi), g2 * np.cos(psi)]])
    return RotationData(mu, theta, al1, al2, A, dA, d2A, B)


@dataclass(frozen=True)
class CoefficientsB:
    """b1..b11 per time sample; index with ``b[k]`` for k = 1..11."""

    values: np.ndarray  # shape (12, N); row 0 unused

    def __getitem__(self, k: int) -> np.ndarray:
        if not 1 <= k <= 11:
            raise IndexError("coefficients are numbered 1..11")
        return self.values[k]

    def subsample(self, step: int) -> "CoefficientsB":
        return CoefficientsB(self.values[:, ::step])


def coeffs_b(a: CoefficientsA, rot: RotationData, env: EnvelopeDecomposition) -> CoefficientsB:
    """First-order action coefficients in the rotated (y1, y2) variables.

    Obtained by substituting (x, y) = A (y1, y2) into the (x, y) form, with
    dA/dt and d2A/dt2 from the analytic mu-derivatives of A.
    """
    A = rot.A
    Ad = rot.A_dot(env.mu_dot)
    Add = rot.A_ddot(env.mu_dot, env.mu_ddot)
    A11, A12, A21, A22 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    D11, D12, D21, D22 = Ad[0, 0], Ad[0, 1], Ad[1, 0], Ad[1, 1]
    E11, E12, E21, E22 = Add[0, 0], Add[0, 1], Add[1, 0], Add[1, 1]
    a1, a2, a3, a4, a5, a6, a7, a8, a9, a10, a11 = (a[k] for k in range(1, 12))
    b = np.zeros((12, A11.shape[0]))
    b[1] = (a4*A11*D11 + a6*A11*D21 + a7*A21*D11 + a5*A21*D21 + a8*A11*E11
            + a10*A11*E21 + a11*A21*E11 + a9*A21*E21 + a1*A11**2 + a3*A21*A11 + a2*A21**2)
    b[2] = (a4*A12*D12 + a6*A12*D22 + a7*A22*D12 + a5*A22*D22 + a8*A12*E12
            + a10*A12*E22 + a11*A22*E12 + a9*A22*E22 + a1*A12**2 + a3*A22*A12 + a2*A22**2)
    b[3] = (a4*(A12*D11 + A11*D12) + a7*(A22*D11 + A21*D12)
            + a5*(A22*D21 + A21*D22) + a6*(A11*D22 + A12*D21) + a10*(A12*E21 + A11*E22)
            + a11*(A22*E11 + A21*E12) + a8*(A11*E12 + A12*E11) + a9*(A22*E21 + A21*E22)
            + a3*(A21*A12 + A11*A22) + 2*a2*A21*A22 + 2*a1*A11*A12)
    b[4] = (2*a8*A11*D11 + 2*a10*A11*D21 + 2*a11*A21*D11 + 2*a9*A21*D21 + a4*A11**2
            + a6*A21*A11 + a7*A21*A11 + a5*A21**2)
    b[5] = (2*a8*A12*D12 + 2*a10*A12*D22 + 2*a11*A22*D12 + 2*a9*A22*D22 + a4*A12**2
            + a6*A22*A12 + a7*A22*A12 + a5*A22**2)
    b[6] = (2*a8*A11*D12 + 2*a11*A21*D12 + 2*a10*A11*D22 + 2*a9*A21*D22 + a4*A11*A12
            + a7*A21*A12 + a6*A11*A22 + a5*A21*A22)
    b[7] = (2*a8*A12*D11 + 2*a11*A22*D11 + 2*a10*A12*D21 + 2*a9*A22*D21 + a4*A11*A12
            + a7*A11*A22 + a6*A12*A21 + a5*A21*A22)
    b[8] = a8*A11**2 + a10*A21*A11 + a11*A21*A11 + a9*A21**2
    b[9] = a8*A12**2 + a10*A22*A12 + a11*A22*A12 + a9*A22**2
    b[10] = a8*A11*A12 + a11*A21*A12 + a10*A11*A22 + a9*A21*A22
    b[11] = a8*A11*A12 + a10*A21*A12 + a11*A11*A22 + a9*A21*A22
    return CoefficientsB(b)


def bsum_closed_forms(env: EnvelopeDecomposition):
    """Closed forms of b1+b2 and b8+b9 (returned as a pair of arrays)."""
    from .special import cubic_term, f_mu

    mu = env.mu
    d = 3.0 + mu * mu
    b12 = (-f_mu(mu) * env.mu_dot**2 - 4.0 * mu * env.mu_dot * env.phi_dot / d
           - 2.0 * (3.0 + 2.0 * mu * mu) * env.phi_ddot / d)
    return b12, -cubic_term(mu)


def action0(y1, y2, dt_coarse: float, L: float) -> float:
    """Leading action (dt/L) sum (y1^2 + y2^2) on the coarse grid."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    return float(dt_coarse / L * np.sum(y1 * y1 + y2 * y2))


def action1(y1, y2, b: CoefficientsB, beta: float, T: float) -> float:
    """First-order action beta dt sum_j {b1 y1^2 + ... + b11 y1'' y2} on a periodic grid of window T.

    Time derivatives of y1, y2 are spectral on the grid they are given on.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    dt = T / y1.shape[-1]
    d1, d2 = derivative_array(y1, T, 1), derivative_array(y2, T, 1)
    dd1, dd2 = derivative_array(y1, T, 2), derivative_array(y2, T, 2)
    integrand = (b[1]*y1*y1 + b[2]*y2*y2 + b[3]*y1*y2 + b[4]*y1*d1 + b[5]*y2*d2
                 + b[6]*y1*d2 + b[7]*d1*y2 + b[8]*y1*dd1 + b[9]*y2*dd2
                 + b[10]*y1*dd2 + b[11]*dd1*y2)
    return float(beta * dt * np.sum(integrand))


def action1_xy(x, y, a: CoefficientsA, beta: float, T: float) -> float:
    """First-order action in the unrotated (x, y) variables, for cross-checks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dt = T / x.shape[-1]
    xd, yd = derivative_array(x, T, 1), derivative_array(y, T, 1)
    xdd, ydd = derivative_array(x, T, 2), derivative_array(y, T, 2)
    integrand = (a[1]*x*x + a[2]*y*y + a[3]*x*y + a[4]*x*xd + a[5]*y*yd + a[6]*x*yd
                 + a[7]*xd*y + a[8]*x*xdd + a[9]*y*ydd + a[10]*x*ydd + a[11]*xdd*y)
    return float(beta * dt * np.sum(integrand))


class XY(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    y1: np.ndarray
    y2: np.ndarray


def _noiseless_output(X: ComplexSignal, env, params: ChannelParams) -> np.ndarray:
    out = phi0(X, params.L, params.gamma).samples
    if params.beta != 0.0:
        out = out + phi1_from_env(env, params.L, params)
    return out


def xy_from_output(Y: ComplexSignal, X: ComplexSignal, params: ChannelParams) -> XY:
    """Deviation (x, y) of Y from the noiseless output and its rotated form (y1, y2)."""
    if len(Y) != len(X):
        raise ValueError("Y and X must share a grid")
    env = decompose(X, params)
    dev = (Y.samples - _noiseless_output(X, env, params)) * np.exp(-1j * (env.phi + env.mu))
    rot = rotation(env.mu)
    u = dev * np.exp(1j * rot.theta)
    return XY(dev.real, dev.imag, np.sqrt(rot.alpha1) * u.real, np.sqrt(rot.alpha2) * u.imag)


def y_to_output(y1, y2, X: ComplexSignal, params: ChannelParams) -> ComplexSignal:
    """Inverse of :func:`xy_from_output`: Y = B (y1, y2) + Phi(L)."""
    env = decompose(X, params)
    B = rotation(env.mu, env.phi).B
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    re = B[0, 0] * y1 + B[0, 1] * y2
    im = B[1, 0] * y1 + B[1, 1] * y2
    return X.replace(_noiseless_output(X, env, params) + re + 1j * im, tag="output")


def receiver_coordinates(Y: ComplexSignal, X: ComplexSignal, params: ChannelParams) -> ComplexSignal:
    """Rotated receiver signal y1 + i y2 restricted to the coarse grid (|w| <= W_d/2).

    The complex combination is filtered as one signal, so the M_d kept bins carry
    M_d real degrees of freedom per quadrature (filtering y1 and y2 separately
    would drop half of the unpaired Nyquist bin).
    """
    xy = xy_from_output(Y, X, params)
    return ComplexSignal(X.grid, coarse_array(xy.y1 + 1j * xy.y2, X.grid.M_d), "coarse")


def coarse_coefficients(X: ComplexSignal, params: ChannelParams):
    """Envelope decomposition and b-coefficients sampled at the coarse-grid times."""
    env = decompose(X, params)
    b = coeffs_b(coeffs_a(env), rotation(env.mu), env)
    step = 1 if X.level == "coarse" else X.grid.decimation
    return env.subsample(step), b.subsample(step)


@dataclass(frozen=True)
class LogPdf:
    """ln P_d of a coarse receiver signal with its ingredients."""

    value: float
    log_leading: float
    correction_ratio: float
    S0: float
    S1: float
    unreliable: bool

    def __float__(self) -> float:
        return self.value


def log_cond_pdf(Yt_d: ComplexSignal, X: ComplexSignal, params: ChannelParams,
                 normalization: str = "literal") -> LogPdf:
    """Log conditional density of the coarse rotated receiver signal ``Yt_d`` = y1 + i y2 given X.

    ln P = ln Lambda0 + ln(1 + Lambda1/Lambda0) - (S0 + S1)/Q.
    ``normalization`` selects the closed-form first-order factor ("literal") or the
    value that normalizes the first-order density exactly on this grid ("exact").
    """
    from .information import norm_factors

    if Yt_d.level != "coarse":
        raise ValueError("log_cond_pdf takes a coarse-grid receiver signal")
    params.check_perturbative()
    grid = X.grid
    y1, y2 = Yt_d.samples.real, Yt_d.samples.imag
    S0 = action0(y1, y2, grid.dt_coarse, params.L)
    S1 = 0.0
    if params.beta != 0.0:
        _, b = coarse_coefficients(X, params)
        S1 = action1(y1, y2, b, params.beta, grid.T)
    nf = norm_factors(X, params, normalization=normalization)
    unreliable = abs(S1 / params.Q) > 0.5
    if unreliable:
        warnings.warn("|S1/Q| > 0.5: first-order density unreliable", PerturbativeWarning, stacklevel=2)
    value = nf.log_leading + np.log1p(nf.correction_ratio) - (S0 + S1) / params.Q
    return LogPdf(float(value), nf.log_leading, nf.correction_ratio, S0, S1, bool(unreliable))

