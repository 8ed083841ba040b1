"""First-order deviation kappa1 via Green's functions in z (verification path).

kappa1 solves  k'' - 2i nu k' - 4 nu^2 Re k = F(z, t)  with k(0) = k(L) = 0,
nu = gamma rho^2 = mu/L and primes in z. All z-dependence of the forcing is
polynomial, so it is carried exactly as coefficient arrays (``ZPoly``) and the
split Gauss-Legendre rule at z' = z integrates the piecewise-polynomial
integrand exactly once enough nodes are used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .action import xy_from_output
from .envelope import decompose
from .errors import QuadratureError
from .grid import ComplexSignal, derivative_array
from .propagation import ChannelParams


def green_GF(z, zp, mu, L: float):
    """Kernel multiplying F(z') in kappa1 = -L int_0^L [G_F F + G_Fbar conj(F)] dz'."""
    z, zp, m = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (z, zp, mu)))
    i = 1j
    m2 = m * m
    left = z * (L - zp) * (
        (m2 + 3) * L**2 * (3 * L**2 + 3 * i * m * L * z - m2 * z**2)
        + m * L * zp * (-3 * i * (m2 - i * m + 3) * L**2 + 3 * m * L * z * (m2 - i * m + 3)
                        - m2 * (m - 3 * i) * z**2)
        + m2 * zp**2 * (3 * i * (m + i) * L**2 - 3 * m * L * z * (m + i) + 2 * m2 * z**2))
    right = zp * (L - z) * (
        3 * L**2 * ((m2 + 3) * L**2 + i * m * L * z * (m2 + i * m + 3) - (1 + i * m) * m2 * z**2)
        + 3 * m * L * zp * (-i * (m2 + 3) * L**2 + L * m * z * (m2 + i * m + 3) - m2 * z**2 * (m - i))
        - m2 * zp**2 * ((m2 + 3) * L**2 + m * L * z * (m + 3 * i) - 2 * m2 * z**2))
    return np.where(z <= zp, left, right) / (3 * (m2 + 3) * L**6)


def green_GFbar(z, zp, mu, L: float):
    """Kernel multiplying conj(F(z')) in kappa1."""
    z, zp, m = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (z, zp, mu)))
    i = 1j
    m2 = m * m
    right = zp * (L - z) * (
        zp**2 * ((m2 + 3) * L**2 + m * L * z * (m + 3 * i) - 2 * m2 * z**2)
        + 3 * L**2 * z * (i * L * (m + 2 * i) - i * m * z + z)
        + 3 * m * L * z * zp * ((m + i) * z - (m + 2 * i) * L))
    left = z * (L - zp) * (
        (m2 + 3) * L**2 * z**2
        + zp**2 * (3 * L**2 * (1 - i * m) + 3 * m * L * z * (m + i) - 2 * m2 * z**2)
        + L * zp * (3 * i * L**2 * (m + 2 * i) - 3 * m * L * z * (m + 2 * i) + m * z**2 * (m + 3 * i)))
    return m2 * np.where(z <= zp, left, right) / (3 * (m2 + 3) * L**6)


class ZPoly:
    """Polynomial in z with time-sample coefficient arrays: sum_k c[k] z^k."""

    __slots__ = ("c",)
    # ndarray * ZPoly must dispatch to ZPoly.__rmul__ rather than broadcast elementwise.
    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.c = np.array(coeffs, dtype=np.complex128, ndmin=2)

    @classmethod
    def monomials(cls, *terms):
        n = max(len(terms), 1)
        size = max(np.size(t) for t in terms)
        c = np.zeros((n, size), dtype=np.complex128)
        for k, t in enumerate(terms):
            c[k] = t
        return cls(c)

    def _pad(self, n):
        if self.c.shape[0] >= n:
            return self.c
        return np.vstack([self.c, np.zeros((n - self.c.shape[0], self.c.shape[1]))])

    def __add__(self, other):
        if not isinstance(other, ZPoly):
            other = ZPoly(np.asarray(other, dtype=np.complex128)[None] * np.ones((1, self.c.shape[1])))
        n = max(self.c.shape[0], other.c.shape[0])
        return ZPoly(self._pad(n) + other._pad(n))

    __radd__ = __add__

    def __neg__(self):
        return ZPoly(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ZPoly):
            n = self.c.shape[0] + other.c.shape[0] - 1
            out = np.zeros((n, self.c.shape[1]), dtype=np.complex128)
            for j in range(self.c.shape[0]):
                out[j:j + other.c.shape[0]] += self.c[j] * other.c
            return ZPoly(out)
        return ZPoly(self.c * np.asarray(other))

    __rmul__ = __mul__

    def conj(self):
        return ZPoly(self.c.conj())

    @property
    def real(self):
        return ZPoly(self.c.real)

    @property
    def imag(self):
        return ZPoly(self.c.imag)

    def dz(self):
        if self.c.shape[0] == 1:
            return ZPoly(np.zeros_like(self.c))
        k = np.arange(1, self.c.shape[0])[:, None]
        return ZPoly(self.c[1:] * k)

    def dt(self, T: float, order: int = 1):
        return ZPoly(derivative_array(self.c, T, order))

    def __call__(self, z):
        """Values at z (scalar -> (N,), array of shape S -> S + (N,))."""
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape + (self.c.shape[1],), dtype=np.complex128)
        for ck in self.c[::-1]:
            out = out * z[..., None] + ck
        return out


def _rotated_second_derivative(g: ZPoly, theta_dot: ZPoly, theta_ddot: ZPoly, T: float) -> ZPoly:
    # exp(-i theta) d^2/dt^2 (exp(i theta) g)
    return g.dt(T, 2) + 2j * theta_dot * g.dt(T, 1) + (1j * theta_ddot - theta_dot * theta_dot) * g


def forcing(X: ComplexSignal, Y: ComplexSignal, params: ChannelParams) -> ZPoly:
    """Right-hand side F(z, t) of the kappa1 problem as a polynomial in z."""
    env = decompose(X, params)
    xy = xy_from_output(Y, X, params)
    T, L, g, beta = X.grid.T, params.L, params.gamma, params.beta
    rho, rd, rdd, pd, pdd = env.rho, env.rho_dot, env.rho_ddot, env.phi_dot, env.phi_ddot
    mu = env.mu
    nu = mu / L
    n = rho.shape[0]
    zero = np.zeros(n)

    d = 1.0 + mu * mu / 3.0
    u = (mu * xy.x - xy.y) / d
    w = ((1.0 - 2.0 * mu * mu / 3.0) * xy.x + mu * xy.y) / d
    k0 = ZPoly.monomials(zero, w / L, mu * u / L**2) + 1j * ZPoly.monomials(
        zero, -u / L, mu * w / L**2, (2.0 * mu * mu / 3.0) * u / L**3)

    rd2_over_r = rd**2 * env.inv_rho()
    p = beta * (ZPoly.monomials(zero, 2 * pd * rd + rho * pdd, nu * (rdd + 3 * rd2_over_r))
                + 1j * ZPoly.monomials(zero, rho * pd**2 - rdd, nu * (4 * pd * rd + rho * pdd),
                                       nu**2 * (2.0 / 3.0) * (rdd + 5 * rd2_over_r)))

    theta_dot = ZPoly.monomials(pd, env.mu_dot / L)
    theta_ddot = ZPoly.monomials(pdd, env.mu_ddot / L)

    L0 = k0.dz() - 2j * nu * k0.real
    dL1 = (1j * beta * _rotated_second_derivative(k0, theta_dot, theta_ddot, T)
           - 2j * g * rho * (2.0 * k0 * p.real + k0.conj() * p))
    F = (-dL1.dz() - 2.0 * nu * dL1.imag
         - 1j * beta * _rotated_second_derivative(L0, theta_dot, theta_ddot, T)
         + 2j * g * rho * (2.0 * L0 * p.real - L0.conj() * p))
    return F


@dataclass(frozen=True)
class Kappa1Result:
    z: np.ndarray          # (n_z,)
    values: np.ndarray     # (n_z, N)
    F: ZPoly
    mu: np.ndarray
    L: float
    quad_change: float     # relative change when n_quad is doubled

    def residual(self) -> float:
        """max |k'' - 2i nu k' - 4 nu^2 Re k - F| / max |F| on interior z, central differences."""
        h = self.z[1] - self.z[0]
        k = self.values
        kpp = (k[2:] - 2 * k[1:-1] + k[:-2]) / h**2
        kp = (k[2:] - k[:-2]) / (2 * h)
        nu = self.mu / self.L
        Fz = self.F(self.z[1:-1])
        r = kpp - 2j * nu * kp - 4 * nu**2 * k[1:-1].real - Fz
        return float(np.max(np.abs(r)) / np.max(np.abs(Fz)))


def _kappa1_values(F: ZPoly, mu, L, z, n_quad, chunk: int = 16):
    x, wts = np.polynomial.legendre.leggauss(n_quad)
    out = np.empty((z.size, F.c.shape[1]), dtype=np.complex128)
    m = mu[None, None, :]
    for start in range(0, z.size, chunk):
        zc = z[start:start + chunk]
        total = np.zeros((zc.size, F.c.shape[1]), dtype=np.complex128)
        for lo, hi in ((np.zeros_like(zc), zc), (zc, np.full_like(zc, L))):
            half = 0.5 * (hi - lo)
            zp = half[:, None] * x[None, :] + 0.5 * (hi + lo)[:, None]   # (chunk, n_quad)
            Fv = F(zp)                                                  # (chunk, n_quad, N)
            G = green_GF(zc[:, None, None], zp[:, :, None], m, L)
            H = green_GFbar(zc[:, None, None], zp[:, :, None], m, L)
            total += half[:, None] * np.einsum("q,cqn->cn", wts, G * Fv + H * Fv.conj())
        out[start:start + chunk] = -L * total
    return out


def kappa1(X: ComplexSignal, Y: ComplexSignal, params: ChannelParams, n_quad: int = 16,
           n_z: int = 101, rtol: float = 1e-6) -> Kappa1Result:
    """kappa1 on a uniform z grid of ``n_z`` points by split Gauss-Legendre quadrature in z'.

    Raises QuadratureError when doubling ``n_quad`` changes the result by more than ``rtol``
    (checked on a tenth of the z points).
    """
    if n_quad < 16:
        raise ValueError("n_quad must be at least 16")
    env = decompose(X, params)
    F = forcing(X, Y, params)
    z = np.linspace(0.0, params.L, n_z)
    k = _kappa1_values(F, env.mu, params.L, z, n_quad)
    # the doubled rule is evaluated on every tenth z point only
    sub = slice(None, None, 10)
    k2 = _kappa1_values(F, env.mu, params.L, z[sub], 2 * n_quad)
    scale = np.max(np.abs(k2))
    change = float(np.max(np.abs(k[sub] - k2)) / scale) if scale > 0 else 0.0
    if change > rtol:
        raise QuadratureError(f"kappa1 quadrature changed by {change:.2e} on doubling n_quad")
    return Kappa1Result(z, k, F, env.mu, params.L, change)
