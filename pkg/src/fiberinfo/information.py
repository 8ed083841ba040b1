"""Normalization factors, entropies and the first-order mutual information."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import IncompleteEnsembleError
from .grid import ComplexSignal, derivative_array
from .propagation import ChannelParams

# Functionals an averager must provide; all are time averages int dt/T <...> except H_X.
REQUIRED = ("log_jacobian", "cubic", "f_mu_dot2", "phase", "H_X")


@dataclass(frozen=True)
class NormalizationFactors:
    log_leading: float       # M_d ln(dt_d / (pi Q L))
    correction_ratio: float  # Lambda1 / Lambda0, O(beta L W^2)


def coarse_dt(params: ChannelParams) -> float:
    return 2.0 * np.pi / params.W_d


def log_leading(params: ChannelParams, M_d: int) -> float:
    return M_d * np.log(coarse_dt(params) / (np.pi * params.Q * params.L))


def norm_factors(X: ComplexSignal, params: ChannelParams, normalization: str = "literal") -> NormalizationFactors:
    """ln Lambda0 and the first-order ratio Lambda1/Lambda0 for input X.

    "literal": M_d beta L [(W_d^2/12) <4mu^3/(15(3+mu^2))> - <f mu'^2 + 4 mu mu' phi'/(3+mu^2)
    + 2(3+2mu^2) phi''/(3+mu^2)>], time averages taken on X's own grid.
    "exact": (beta L/2) sum_j [(b1+b2)_j + (b8+b9)_j (D2)_jj] over coarse samples, which makes the
    first-order density integrate to one on the coarse grid.
    """
    from .action import coarse_coefficients
    from .envelope import decompose
    from .special import cubic_term, f_mu

    params.check_perturbative()
    grid = X.grid
    M_d = grid.M_d
    lead = log_leading(params, M_d)
    if params.beta == 0.0:
        return NormalizationFactors(lead, 0.0)
    bL = params.beta * params.L
    if normalization == "literal":
        env = decompose(X, params)
        mu = env.mu
        d = 3.0 + mu * mu
        tail = (f_mu(mu) * env.mu_dot**2 + 4.0 * mu * env.mu_dot * env.phi_dot / d
                + 2.0 * (3.0 + 2.0 * mu * mu) * env.phi_ddot / d)
        ratio = M_d * bL * (params.W_d**2 / 12.0 * np.mean(cubic_term(mu)) - np.mean(tail))
    elif normalization == "exact":
        _, b = coarse_coefficients(X, params)
        e0 = np.zeros(M_d)
        e0[0] = 1.0
        d2 = derivative_array(e0, grid.T, 2)[0]
        ratio = 0.5 * bL * float(np.sum(b[1] + b[2] + (b[8] + b[9]) * d2))
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return NormalizationFactors(lead, float(ratio))


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float = 0.0
    method: str = "analytic"


@dataclass(frozen=True)
class EnsembleAverager:
    """Ensemble averages needed by the mutual information.

    Keys: log_jacobian, cubic, f_mu_dot2, phase are time averages int dt/T <...>;
    H_X is the input differential entropy on the coarse grid.
    """

    averages: Mapping[str, Estimate]
    T: float
    W_X: Optional[float] = None

    def missing(self) -> list:
        return [k for k in REQUIRED if k not in self.averages]

    def require(self) -> None:
        missing = self.missing()
        if missing:
            raise IncompleteEnsembleError(missing)

    def __getitem__(self, key: str) -> float:
        try:
            return self.averages[key].value
        except KeyError:
            raise IncompleteEnsembleError([key]) from None


def _M_d(avg: EnsembleAverager, params: ChannelParams) -> int:
    return int(round(avg.T * params.W_d / (2.0 * np.pi)))


def jacobian_log_avg(avg: EnsembleAverager, params: ChannelParams) -> float:
    """<sum_j ln sqrt(1 + mu_j^2/3)> = M_d <int dt/T ln sqrt(1 + mu^2/3)>."""
    return _M_d(avg, params) * avg["log_jacobian"]


def mean_correction_ratio(avg: EnsembleAverager, params: ChannelParams) -> float:
    """<Lambda1/Lambda0> over the ensemble (literal normalization)."""
    M_d = _M_d(avg, params)
    bL = params.beta * params.L
    return M_d * bL * (params.W_d**2 / 12.0 * avg["cubic"] - avg["f_mu_dot2"] - avg["phase"])


def conditional_entropy(avg: EnsembleAverager, params: ChannelParams) -> float:
    """H_{Y|X} = M_d - ln Lambda0 - <Lambda1/Lambda0>, linearized in beta."""
    M_d = _M_d(avg, params)
    return M_d - log_leading(params, M_d) - mean_correction_ratio(avg, params)


def output_entropy(avg: EnsembleAverager, params: ChannelParams) -> float:
    """Leading-order H_Y = H_X - <ln J_d>."""
    return avg["H_X"] - jacobian_log_avg(avg, params)


@dataclass(frozen=True)
class MutualInformation:
    H_X: float
    jacobian: float     # -<ln J_d>
    log_norm: float     # M_d ln(dt_d e^-1 / (pi Q L))
    wd_term: float      # + M_d (beta L W_d^2) I_d
    wx_term: float      # - M_d (beta L W_X^2) I_X, including the phase functional
    total: float
    delta_I: float      # first-order correction per coarse sample
    G: Optional[float]  # delta_I / (beta L W_X^2)
    M_d: int
    groups: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"H_X": self.H_X, "jacobian": self.jacobian, "log_norm": self.log_norm,
                "wd_term": self.wd_term, "wx_term": self.wx_term, "total": self.total,
                "delta_I": self.delta_I, "G": self.G, "M_d": self.M_d, **self.groups}


def mutual_information(avg: EnsembleAverager, params: ChannelParams) -> MutualInformation:
    """I = H_X - <ln J_d> + M_d ln(dt_d/(e pi Q L)) + M_d beta L W_d^2 I_d - M_d beta L W_X^2 I_X."""
    avg.require()
    M_d = _M_d(avg, params)
    bL = params.beta * params.L
    jac = -jacobian_log_avg(avg, params)
    log_norm = log_leading(params, M_d) - M_d
    wd = M_d * bL * params.W_d**2 * avg["cubic"] / 12.0
    wx = -M_d * bL * (avg["f_mu_dot2"] + avg["phase"])
    total = avg["H_X"] + jac + log_norm + wd + wx
    delta = (wd + wx) / M_d
    G = None
    groups = {"beta_L_Wd2": bL * params.W_d**2}
    if avg.W_X:
        groups["beta_L_WX2"] = bL * avg.W_X**2
        if bL != 0.0:
            G = delta / (bL * avg.W_X**2)
    return MutualInformation(avg["H_X"], jac, log_norm, wd, wx, total, delta, G, M_d, groups)
