"""Flat key=value run configuration.

One ``key = value`` pair per line; ``#`` starts a comment. Units are SI with
angular frequencies:

    beta     s^2/m        dispersion coefficient
    gamma    1/(W m)      Kerr coefficient
    L        m            fiber length
    Q        W/(m rad/s)  noise spectral density per unit angular frequency
    P        W            average input power
    T        s            time window (or give W_d and T follows from M_d)
    W_d      rad/s        receiver bandwidth, 2 pi M_d / T
    W_X      rad/s        signal bandwidth for the mutual information; 0 = ensemble value
    pulse_W  rad/s        width parameter of the built-in Gaussian pulse; 0 = 20/T
    M, M_d   -            fine and coarse grid sizes
    N        -            Monte Carlo sample count
    steps    -            split-step count
    seed     -            RNG seed
    out      -            output directory
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .grid import GridSpec
from .propagation import ChannelParams


class HierarchyWarning(UserWarning):
    """The bandwidth ordering W_X <~ W_d << W' is violated."""


@dataclass(frozen=True)
class RunConfig:
    beta: float = 5e-7
    gamma: float = 1.0
    L: float = 1.0
    Q: float = 1e-6
    P: float = 1.0
    T: float = 1.0
    M: int = 1024
    M_d: int = 64
    W_X: float = 0.0
    pulse_W: float = 0.0
    N: int = 10000
    steps: int = 1000
    seed: int = 0
    out: str = "."

    def __post_init__(self):
        for name in ("L", "Q", "P", "T"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.gamma < 0 or self.W_X < 0 or self.pulse_W < 0:
            raise ConfigError("gamma, W_X and pulse_W must be non-negative")
        if self.M < 4 or self.M_d < 2 or self.M % self.M_d:
            raise ConfigError("need M_d >= 2 dividing M")
        if self.N < 1 or self.steps < 1:
            raise ConfigError("N and steps must be positive")

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.T, self.M, self.M_d)

    @property
    def params(self) -> ChannelParams:
        g = self.grid
        return ChannelParams(self.beta, self.gamma, self.L, self.Q, g.W_prime, g.W_d)

    @property
    def gamma_tilde(self) -> float:
        return self.gamma * self.L * self.P

    @property
    def pulse_width(self) -> float:
        return self.pulse_W if self.pulse_W > 0 else 20.0 / self.T

    def signal_bandwidth(self) -> float:
        if self.W_X > 0:
            return self.W_X
        from .ensemble import OscillatorEnsemble

        return OscillatorEnsemble(self.P, self.T, self.M).W_X

    def check_hierarchy(self) -> None:
        g = self.grid
        W_X = self.signal_bandwidth()
        if g.W_d / W_X < 1.0:
            warnings.warn(f"W_d/W_X = {g.W_d / W_X:.3g} < 1", HierarchyWarning, stacklevel=2)
        if g.W_prime / g.W_d < 4.0:
            warnings.warn(f"W'/W_d = {g.W_prime / g.W_d:.3g} < 4", HierarchyWarning, stacklevel=2)

    def replace(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **kw)

    def dumps(self) -> str:
        return "".join(f"{f.name} = {_fmt(getattr(self, f.name))}\n" for f in dataclasses.fields(self))


def _fmt(v) -> str:
    return "%.17g" % v if isinstance(v, float) else str(v)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    values: dict = {}
    W_d: Optional[float] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        try:
            if key == "W_d":
                W_d = float(val)
                continue
            if key not in _FIELDS:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            kind = _FIELDS[key].type
            values[key] = val if kind == "str" else int(val) if kind == "int" else float(val)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {val!r}") from None
    if W_d is not None:
        if not W_d > 0:
            raise ConfigError(f"{source}: W_d must be positive")
        M_d = values.get("M_d", RunConfig.M_d)
        T = 2.0 * math.pi * M_d / W_d
        if "T" in values and not math.isclose(values["T"], T, rel_tol=1e-9):
            raise ConfigError(f"{source}: T and W_d disagree (T must equal 2 pi M_d / W_d)")
        values["T"] = T
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc.strerror}") from None
    return parse_config(text, str(p))
