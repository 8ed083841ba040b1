import numpy as np
import pytest

from fiberinfo.ensemble import OscillatorEnsemble, ensemble_averager, entropy_HX
from fiberinfo.errors import IncompleteEnsembleError
from fiberinfo.grid import ComplexSignal
from fiberinfo.information import (REQUIRED, EnsembleAverager, Estimate, conditional_entropy, log_leading,
                                   mutual_information, norm_factors, output_entropy)
from fiberinfo.propagation import ChannelParams
from fiberinfo.rng import stream
from fiberinfo.validate import random_bandlimited


@pytest.fixture
def ens(grid):
    return OscillatorEnsemble(1.0, grid.T, grid.M)


def test_log_leading(params, grid):
    assert log_leading(params, grid.M_d) == pytest.approx(
        grid.M_d * np.log(grid.dt_coarse / (np.pi * params.Q * params.L)), rel=1e-14)


@pytest.mark.parametrize("normalization", ["literal", "exact"])
def test_correction_ratio_vanishes_with_beta(grid, params, normalization):
    X = random_bandlimited(grid, stream(1, 0))
    r = [norm_factors(X, params.with_beta(b), normalization).correction_ratio for b in (4e-7, 2e-7, 0.0)]
    assert r[2] == 0.0
    assert r[0] == pytest.approx(2 * r[1], rel=1e-12)


@pytest.mark.parametrize("normalization", ["literal", "exact"])
def test_correction_ratio_phase_invariant(grid, params, normalization):
    X = random_bandlimited(grid, stream(2, 0))
    Xc = X.replace(X.samples * np.exp(0.83j))
    a = norm_factors(X, params, normalization)
    b = norm_factors(Xc, params, normalization)
    assert b.correction_ratio == pytest.approx(a.correction_ratio, rel=1e-10)
    assert b.log_leading == a.log_leading


def test_correction_ratio_time_shift_invariant(grid, params):
    X = random_bandlimited(grid, stream(3, 0))
    Xs = X.replace(np.roll(X.samples, 37))
    assert norm_factors(Xs, params).correction_ratio == pytest.approx(
        norm_factors(X, params).correction_ratio, rel=1e-10)


def test_unknown_normalization(grid, params, pulse):
    with pytest.raises(ValueError):
        norm_factors(pulse, params, "other")


def test_incomplete_averages_rejected():
    avg = EnsembleAverager({"cubic": Estimate(1.0)}, T=1.0)
    assert set(avg.missing()) == set(REQUIRED) - {"cubic"}
    with pytest.raises(IncompleteEnsembleError) as exc:
        mutual_information(avg, ChannelParams(0.0, 1.0, 1.0, 1e-6, 100.0, 10.0))
    assert "H_X" in str(exc.value)


def test_linear_channel_leading_order(ens, grid):
    p = ChannelParams(0.0, 0.0, 1.0, 1e-6, grid.W_prime, grid.W_d)
    mi = mutual_information(ensemble_averager(ens, p), p)
    HX = entropy_HX(ens.coarse(grid.M_d))
    expect = HX + grid.M_d * np.log(grid.dt_coarse / (np.e * np.pi * p.Q * p.L))
    assert mi.total == pytest.approx(expect, rel=1e-13)
    assert mi.delta_I == 0.0


def test_mi_equals_output_minus_conditional_entropy(ens, params):
    avg = ensemble_averager(ens, params)
    mi = mutual_information(avg, params)
    h = output_entropy(avg, params) - conditional_entropy(avg, params)
    assert mi.total == pytest.approx(h, rel=1e-12, abs=1e-12 * abs(mi.H_X))


def test_delta_I_linear_in_beta(ens, params):
    a = mutual_information(ensemble_averager(ens, params), params).delta_I
    b = mutual_information(ensemble_averager(ens, params), params.with_beta(2 * params.beta)).delta_I
    assert b / a == 2.0


def test_breakdown_sums_to_total(ens, params):
    mi = mutual_information(ensemble_averager(ens, params), params)
    assert mi.total == pytest.approx(mi.H_X + mi.jacobian + mi.log_norm + mi.wd_term + mi.wx_term, rel=1e-14)
    d = mi.as_dict()
    assert d["M_d"] == 64 and "beta_L_Wd2" in d


def test_G_matches_curve(params, grid):
    from fiberinfo.ensemble import curve_G

    # gamma-tilde = gamma L P = 1.5 and v = W_d / W_X = 10
    ens = OscillatorEnsemble(1.5, grid.T, grid.M)
    W_X = grid.W_d / 10.0
    avg = ensemble_averager(ens, params, W_X=W_X)
    mi = mutual_information(avg, params)
    assert mi.G == pytest.approx(curve_G(1.5, 10.0), rel=1e-12)
    assert mi.delta_I > 0
