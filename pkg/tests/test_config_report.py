import math
import warnings

import pytest
from hypothesis import given, strategies as st

from fiberinfo.config import HierarchyWarning, RunConfig, load_config, parse_config
from fiberinfo.errors import ConfigError
from fiberinfo.report import Check, ValidationReport

pos = st.floats(1e-30, 1e30, allow_nan=False, allow_infinity=False)


@given(beta=st.floats(-1e-20, 1e-3, allow_nan=False), gamma=st.floats(0, 1e3, allow_nan=False), L=pos, Q=pos,
       P=pos, T=pos, seed=st.integers(0, 2**32), N=st.integers(1, 10**7))
def test_config_round_trip(beta, gamma, L, Q, P, T, seed, N):
    cfg = RunConfig(beta=beta, gamma=gamma, L=L, Q=Q, P=P, T=T, seed=seed, N=N, out="some/dir")
    assert parse_config(cfg.dumps()) == cfg


def test_defaults_and_comments():
    cfg = parse_config("# comment only\n\nbeta = 1e-7  # trailing\nM = 512\nout = results\n")
    assert cfg.beta == 1e-7 and cfg.M == 512 and cfg.out == "results" and cfg.L == 1.0


def test_W_d_sets_window():
    cfg = parse_config("W_d = 1e9\nM_d = 64\nM = 512\n")
    assert cfg.grid.W_d == pytest.approx(1e9, rel=1e-12)
    assert cfg.T == pytest.approx(2 * math.pi * 64 / 1e9)
    with pytest.raises(ConfigError):
        parse_config("W_d = 1e9\nT = 1\n")
    with pytest.raises(ConfigError):
        parse_config("W_d = -1\n")


@pytest.mark.parametrize("text, line", [("beta = 1\nfoo = 2\n", 2), ("\n\nM = 1.5\n", 3), ("beta\n", 1)])
def test_config_errors_name_the_line(text, line):
    with pytest.raises(ConfigError, match=f"<config>:{line}:"):
        parse_config(text)


@pytest.mark.parametrize("kw", [{"L": 0.0}, {"Q": -1.0}, {"P": 0.0}, {"T": 0.0}, {"gamma": -1.0},
                                {"M": 100, "M_d": 64}, {"N": 0}, {"steps": 0}])
def test_invalid_fields(kw):
    with pytest.raises(ConfigError):
        RunConfig(**kw)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")
    p = tmp_path / "run.cfg"
    p.write_text("seed = 3\n")
    assert load_config(p).seed == 3


def test_hierarchy_warnings():
    with pytest.warns(HierarchyWarning, match="W'/W_d"):
        RunConfig(M=128, M_d=64).check_hierarchy()
    with pytest.warns(HierarchyWarning, match="W_d/W_X"):
        RunConfig(W_X=1e4).check_hierarchy()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        RunConfig().check_hierarchy()


def test_derived_quantities():
    cfg = RunConfig(gamma=2.0, L=3.0, P=0.5, T=2.0)
    assert cfg.gamma_tilde == 3.0
    assert cfg.pulse_width == 10.0
    assert cfg.params.W_d == cfg.grid.W_d


checks = st.builds(Check, name=st.from_regex(r"[a-z][a-z0-9_]{0,20}", fullmatch=True),
                   expected=st.floats(allow_nan=False), observed=st.floats(allow_nan=True),
                   tolerance=st.floats(0, 1e3), passed=st.booleans(),
                   stderr=st.none() | st.floats(0, 1e3),
                   detail=st.from_regex(r"[ -~]{0,30}", fullmatch=True).filter(lambda s: "\n" not in s))


@given(st.lists(checks, unique_by=lambda c: c.name, max_size=6))
def test_report_round_trip(items):
    rep = ValidationReport(list(items))
    back = ValidationReport.from_keyvalue(rep.to_keyvalue())
    assert len(back.checks) == len(items)
    for a, b in zip(items, back.checks):
        assert (a.name, a.expected, a.tolerance, a.passed, a.stderr, a.detail) == \
               (b.name, b.expected, b.tolerance, b.passed, b.stderr, b.detail)
        assert a.observed == b.observed or (math.isnan(a.observed) and math.isnan(b.observed))
    assert back.passed == rep.passed


def test_report_table_and_failures():
    rep = ValidationReport()
    rep.add(Check("good", 1.0, 1.0, 0.1, True))
    rep.add(Check("bad", 1.0, 2.0, 0.1, False, stderr=0.5, detail="off"))
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["bad"]
    lines = rep.table().splitlines()
    assert lines[2].endswith("PASS") and "FAIL  off" in lines[3]
    assert rep.to_keyvalue().endswith("passed=0\n")
