"""Oracle suite behind ``fiberinfo validate``; every check returns a :class:`Check`."""

from __future__ import annotations

import numpy as np

from . import ensemble as ens_mod
from .action import bsum_closed_forms, coeffs_a, coeffs_b, kappa0, rotation
from .config import RunConfig
from .envelope import decompose
from .grid import ComplexSignal, GridSpec, coarse_array, derivative_array
from .green import kappa1
from .propagation import (ChannelParams, gaussian_pulse, phi0, phi1, propagate_batch,
                          split_step_propagate)
from .report import Check, ValidationReport
from .rng import stream, streams

R1_REFERENCE = 4.84
R2_REFERENCE = float(np.sqrt(186.0))


def random_bandlimited(grid: GridSpec, rng: np.random.Generator, P: float = 1.0, n_modes: int = 8,
                       depth: float = 0.5) -> ComplexSignal:
    """Constant carrier plus random modes in bins 1..n_modes (both signs); |X| stays >= (1-depth) sqrt(P)."""
    spec = np.zeros(grid.M, dtype=np.complex128)
    k = np.arange(1, n_modes + 1)
    for idx in (k, -k):
        spec[idx] = rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)
    fluct = np.fft.ifft(spec) * grid.M
    fluct *= depth / np.max(np.abs(fluct))
    x = np.sqrt(P) * (1.0 + fluct) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return ComplexSignal(grid, x, "fine")


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# ---------------------------------------------------------------- (1) b-sum oracle

def bsum_errors(X: ComplexSignal, params: ChannelParams):
    """Pointwise relative errors of b1+b2 and b8+b9 against their closed forms, and the
    relative error of the time integral of b1+b2."""
    env = decompose(X, params)
    b = coeffs_b(coeffs_a(env), rotation(env.mu), env)
    c12, c89 = bsum_closed_forms(env)
    s12, s89 = b[1] + b[2], b[8] + b[9]
    integ = abs(np.sum(s12) - np.sum(c12)) / abs(np.sum(c12))
    return _rel(s12, c12), _rel(s89, c89), float(integ)


def check_bsums(grid: GridSpec, params: ChannelParams, n_signals: int = 20, seed: int = 0, tol: float = 1e-8):
    e12 = e89 = eint = 0.0
    for k in range(n_signals):
        X = random_bandlimited(grid, stream(seed, k), P=1.0 / (params.gamma * params.L or 1.0))
        a, b, c = bsum_errors(X, params)
        e12, e89, eint = max(e12, a), max(e89, b), max(eint, c)
    return [
        Check("bsum_b1_b2_pointwise", 0.0, e12, tol, e12 < tol),
        Check("bsum_b8_b9_pointwise", 0.0, e89, tol, e89 < tol),
        Check("bsum_b1_b2_time_integral", 0.0, eint, tol, eint < tol),
    ]


# ---------------------------------------------------------------- (2)-(3) boundary problems

def check_kappa0(seed: int = 0, n: int = 1000, tol: float = 1e-12) -> Check:
    rng = stream(seed, 10_000)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    mu = rng.uniform(0, 50, n)
    err = float(np.max(np.abs(kappa0(x, y, mu, 1.0) - (x + 1j * y)) / np.maximum(1.0, np.hypot(x, y))))
    return Check("kappa0_boundary", 0.0, err, tol, err < tol)


def _kappa1_case(grid: GridSpec, params: ChannelParams, pulse_W: float, seed: int):
    X = gaussian_pulse(grid, 1.0 / (params.gamma * params.L or 1.0), pulse_W)
    rng = stream(seed, 20_000)
    d = rng.standard_normal(grid.M) + 1j * rng.standard_normal(grid.M)
    spec = np.fft.fft(d)
    spec[np.abs(grid.frequencies("fine")) > 2.0 * pulse_W] = 0.0
    dev = np.fft.ifft(spec)
    dev *= 0.05 / np.max(np.abs(dev))
    Y = X.replace(phi0(X, params.L, params.gamma).samples + phi1(X, params.L, params).samples + dev, "output")
    return X, Y


def check_kappa1(grid: GridSpec, params: ChannelParams, pulse_W: float, seed: int = 0, n_z: int = 401,
                 tol: float = 1e-4):
    X, Y = _kappa1_case(grid, params, pulse_W, seed)
    res = kappa1(X, Y, params, n_z=n_z)
    scale = np.max(np.abs(res.values))
    ends = float(max(np.max(np.abs(res.values[0])), np.max(np.abs(res.values[-1]))) / scale)
    r = res.residual()
    return [Check("kappa1_endpoints", 0.0, ends, 1e-12, ends < 1e-12),
            Check("kappa1_ode_residual", 0.0, r, tol, r < tol)]


def phi1_residual(X: ComplexSignal, params: ChannelParams, z: float, h: float) -> float:
    """|| dPhi1/dz - i gamma Phi0^2 conj(Phi1) - 2i gamma |Phi0|^2 Phi1 + i beta Phi0'' || / || i beta Phi0'' ||."""
    g = params.gamma
    dz = (phi1(X, z + h, params).samples - phi1(X, z - h, params).samples) / (2.0 * h)
    P0 = phi0(X, z, g).samples
    P1 = phi1(X, z, params).samples
    src = 1j * params.beta * derivative_array(P0, X.grid.T, 2)
    r = dz - 1j * g * P0**2 * np.conj(P1) - 2j * g * np.abs(P0) ** 2 * P1 + src
    return float(np.linalg.norm(r) / np.linalg.norm(src))


def check_phi1(grid: GridSpec, params: ChannelParams, pulse_W: float, tol: float = 1e-6) -> Check:
    X = gaussian_pulse(grid, 1.0 / (params.gamma * params.L or 1.0), pulse_W)
    h = 1e-4 * params.L
    worst = max(phi1_residual(X, params, f * params.L, h) for f in (0.25, 0.5, 0.75))
    return Check("phi1_residual", 0.0, worst, tol, worst < tol)


def check_split_step(grid: GridSpec, params: ChannelParams, pulse_W: float, steps: int = 500):
    X = gaussian_pulse(grid, 1.0 / (params.gamma * params.L or 1.0), pulse_W)
    zero = split_step_propagate(X, params.with_beta(0.0), 100)
    e0 = _rel(zero.output.samples, phi0(X, params.L, params.gamma).samples)
    ratios = []
    for beta in (params.beta, 0.5 * params.beta):
        p = params.with_beta(beta)
        out = split_step_propagate(X, p, steps).output.samples
        P1 = phi1(X, p.L, p).samples
        ratios.append(np.linalg.norm(out - phi0(X, p.L, p.gamma).samples - P1) / np.linalg.norm(P1))
    # the remainder after Phi0 + Phi1 is second order: halving beta halves its ratio to Phi1
    order = float(np.log2(ratios[0] / ratios[1])) + 1.0
    return [Check("split_step_beta0_vs_phi0", 0.0, e0, 1e-10, e0 < 1e-10),
            Check("split_step_remainder_order", 2.0, order, 0.1, abs(order - 2.0) < 0.1,
                  detail=f"|SS-Phi0-Phi1|/|Phi1| = {ratios[0]:.3g}")]


# ---------------------------------------------------------------- (6) zero-dispersion statistics

def zero_dispersion_statistics(mu: float, N: int, seed: int, Q: float = 1e-7, steps: int = 50,
                               grid: GridSpec = GridSpec(1.0, 256, 16), batch: int = 500):
    """Constant input with gamma L |X|^2 = mu, beta = 0: returns (Var u1/Var u2, alpha2/alpha1,
    Var y1/target, Var y2/target) with target QL/(2 dt_d), plus their standard errors."""
    params = ChannelParams(0.0, 1.0, 1.0, Q, grid.W_prime, grid.W_d)
    x0 = np.full(grid.M, np.sqrt(mu) + 0j)
    rot = rotation(np.array([mu]))
    th, a1, a2 = rot.theta[0], rot.alpha1[0], rot.alpha2[0]
    u1, u2, y1, y2 = [], [], [], []
    for s in range(0, N, batch):
        n = min(batch, N - s)
        out, _ = propagate_batch(np.tile(x0, (n, 1)), grid, params, steps, streams(seed, s, n))
        dev = (out - np.sqrt(mu) * np.exp(1j * mu)) * np.exp(-1j * mu)
        u = dev * np.exp(1j * th)
        c = coarse_array(np.sqrt(a1) * u.real + 1j * np.sqrt(a2) * u.imag, grid.M_d)
        # at beta = 0 with constant input every fine sample is an independent draw
        u1.append(u.real.ravel())
        u2.append(u.imag.ravel())
        y1.append(c.real.ravel())
        y2.append(c.imag.ravel())
    u1, u2, y1, y2 = (np.concatenate(v) for v in (u1, u2, y1, y2))
    target = Q * params.L / (2.0 * grid.dt_coarse)
    ratio = u1.var() / u2.var()
    # delta-method standard error of a ratio of Gaussian variances
    se_ratio = ratio * np.sqrt(4.0 / u1.size)
    return {
        "ratio": ratio, "ratio_expected": a2 / a1, "ratio_se": se_ratio,
        "vy1": y1.var() / target, "vy2": y2.var() / target, "vy_se": np.sqrt(2.0 / y1.size),
    }


def check_zero_dispersion(mu: float, N: int, seed: int):
    st = zero_dispersion_statistics(mu, N, seed)
    r = st["ratio"] / st["ratio_expected"]
    return [
        Check(f"zero_dispersion_ratio_mu{mu:g}", st["ratio_expected"], st["ratio"], 0.1,
              abs(r - 1.0) < 0.1, stderr=st["ratio_se"]),
        Check(f"zero_dispersion_var_y1_mu{mu:g}", 1.0, st["vy1"], 0.1, abs(st["vy1"] - 1) < 0.1, st["vy_se"]),
        Check(f"zero_dispersion_var_y2_mu{mu:g}", 1.0, st["vy2"], 0.1, abs(st["vy2"] - 1) < 0.1, st["vy_se"]),
    ]


# ---------------------------------------------------------------- (7)-(8) ensemble

def check_ensemble(P: float, T: float, M: int, params: ChannelParams, N: int, seed: int):
    ens = ens_mod.OscillatorEnsemble(P, T, M)
    an = ens_mod.ensemble_averager(ens, params, "analytic")
    mc = ens_mod.ensemble_averager(ens, params, "monte-carlo", N=max(N, 100), seed=seed)
    out = []
    for key in ("cubic", "f_mu_dot2", "log_jacobian", "phase"):
        a, m = an.averages[key], mc.averages[key]
        z = abs(m.value - a.value) / m.stderr
        out.append(Check(f"ensemble_{key}", a.value, m.value, 3.0, z < 3.0, stderr=m.stderr,
                         detail=f"{z:.2f} sigma"))
    return out


def check_thresholds():
    r1 = ens_mod.threshold_r1().value
    r2 = ens_mod.threshold_r2().value
    return [Check("threshold_r1", R1_REFERENCE, r1, 0.01, abs(r1 / R1_REFERENCE - 1) < 0.01),
            Check("threshold_r2", R2_REFERENCE, r2, 0.01, abs(r2 / R2_REFERENCE - 1) < 0.01)]


def run_validation(cfg: RunConfig) -> ValidationReport:
    grid, params = cfg.grid, cfg.params
    W = cfg.pulse_width
    rep = ValidationReport()
    for c in check_bsums(grid, params, seed=cfg.seed):
        rep.add(c)
    rep.add(check_kappa0(cfg.seed))
    for c in check_kappa1(grid, params, W, cfg.seed):
        rep.add(c)
    rep.add(check_phi1(grid, params, W))
    for c in check_split_step(grid, params, W):
        rep.add(c)
    for c in check_zero_dispersion(1.0, cfg.N, cfg.seed):
        rep.add(c)
    for c in check_ensemble(cfg.P, cfg.T, cfg.M, params, cfg.N, cfg.seed):
        rep.add(c)
    for c in check_thresholds():
        rep.add(c)
    return rep
