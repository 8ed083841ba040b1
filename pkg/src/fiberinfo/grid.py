"""Time/frequency grids, DFT conventions, band-limiting and discrete derivatives.

All bandwidths and frequencies are angular (rad/s). The DFT pair is

    F_hat[n'] = (1/M) sum_n F[n] exp(-2 pi i n n'/M),
    F[n]      = sum_n' F_hat[n'] exp(+2 pi i n n'/M),

with bins ordered nonnegative first, then negative (numpy's ``fftfreq`` order).
Bin ``n`` carries the exponent ``exp(+i w_n t)`` in the inverse sum, so a time
derivative multiplies it by ``i w_n``; under the continuous convention
``f(w) = int f(t) exp(+i w t) dt`` the same bin sits at frequency ``-w_n`` and the
rule reads "multiply by -i w". Filters depend only on |w| and are unaffected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import InvalidBandwidthError

Level = Literal["fine", "coarse"]
Tag = Optional[Literal["input", "output", "noise"]]

# Relative size below which an input signal counts as vanishing at t = -T/2.
ENDPOINT_RTOL = 1e-8


def rad_to_hz(w):
    """Convert an angular frequency (rad/s) to Hz."""
    return np.asarray(w) / (2.0 * np.pi)


def hz_to_rad(f):
    """Convert a frequency in Hz to rad/s."""
    return 2.0 * np.pi * np.asarray(f)


@dataclass(frozen=True)
class GridSpec:
    """Fine and coarse periodic grids on the window [-T/2, T/2).

    The coarse grid (M_d points) is obtained from the fine one (M points) by
    truncation in the frequency domain, so M must be a multiple of M_d.
    """

    T: float
    M: int
    M_d: int

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.M < 2 or self.M_d < 2:
            raise ValueError("grids need at least two points")
        if self.M % self.M_d:
            raise ValueError("M must be a positive multiple of M_d")

    @property
    def dt(self) -> float:
        return self.T / self.M

    @property
    def dt_coarse(self) -> float:
        return self.T / self.M_d

    @property
    def W_prime(self) -> float:
        return 2.0 * np.pi * self.M / self.T

    @property
    def W_d(self) -> float:
        return 2.0 * np.pi * self.M_d / self.T

    @property
    def decimation(self) -> int:
        return self.M // self.M_d

    def points(self, level: Level = "fine") -> int:
        return self.M if level == "fine" else self.M_d

    def spacing(self, level: Level = "fine") -> float:
        return self.T / self.points(level)

    def times(self, level: Level = "fine") -> np.ndarray:
        """Sample times t_m = -T/2 + m*dt, m = 0..n-1 (t = +T/2 is the periodic image of t_0)."""
        n = self.points(level)
        return -0.5 * self.T + np.arange(n) * (self.T / n)

    def frequencies(self, level: Level = "fine") -> np.ndarray:
        """Angular bin frequencies w_n = 2 pi n / T in DFT order."""
        n = self.points(level)
        return 2.0 * np.pi * np.fft.fftfreq(n, d=self.T / n)


@dataclass(frozen=True)
class ComplexSignal:
    """Complex envelope samples on the fine or coarse level of a grid."""

    grid: GridSpec
    samples: np.ndarray = field(repr=False)
    level: Level = "fine"
    tag: Tag = None

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if arr.ndim != 1 or arr.shape[0] != self.grid.points(self.level):
            raise ValueError(
                f"{self.level} signal needs {self.grid.points(self.level)} samples, got {arr.shape}"
            )
        if self.tag == "input":
            scale = np.max(np.abs(arr)) if arr.size else 0.0
            if abs(arr[0]) > ENDPOINT_RTOL * scale:
                raise ValueError("input signals must vanish at t = -T/2 (and its periodic image +T/2)")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def dt(self) -> float:
        return self.grid.spacing(self.level)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times(self.level)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies(self.level)

    def replace(self, samples, tag: Tag = None) -> "ComplexSignal":
        return ComplexSignal(self.grid, samples, self.level, tag)


def _samples(signal) -> np.ndarray:
    return signal.samples if isinstance(signal, ComplexSignal) else np.asarray(signal)


def dft(signal) -> np.ndarray:
    """Forward DFT with the 1/M normalization; acts on the last axis."""
    x = _samples(signal)
    return np.fft.fft(x, axis=-1) / x.shape[-1]


def idft(spectrum) -> np.ndarray:
    """Inverse of :func:`dft`."""
    s = np.asarray(spectrum)
    return np.fft.ifft(s, axis=-1) * s.shape[-1]


def band_filter(signal: ComplexSignal, W: float) -> ComplexSignal:
    """Zero every bin with |w_n| > W/2."""
    if not W > 0:
        raise InvalidBandwidthError("bandwidth must be positive")
    cutoff = 2.0 * np.pi / signal.dt
    if W > cutoff * (1.0 + 1e-12):
        raise InvalidBandwidthError(f"bandwidth {W} exceeds the grid cutoff {cutoff}")
    spec = dft(signal)
    spec[np.abs(signal.frequencies) > 0.5 * W * (1.0 + 1e-12)] = 0.0
    return signal.replace(idft(spec), tag=signal.tag if signal.tag != "input" else None)


def _coarse_bins(M: int, M_d: int) -> np.ndarray:
    """Fine-grid bin indices kept on an M_d-point grid, in coarse DFT order."""
    n = np.fft.fftfreq(M_d, d=1.0 / M_d).astype(int)
    return np.where(n >= 0, n, M + n)


def to_coarse(signal: ComplexSignal) -> ComplexSignal:
    """Fine -> coarse by frequency-domain truncation followed by an inverse DFT.

    For even M_d the kept bins are 0..M_d/2-1 and -1..-M_d/2.
    """
    if signal.level == "coarse":
        return signal
    grid = signal.grid
    spec = dft(signal)[_coarse_bins(grid.M, grid.M_d)]
    return ComplexSignal(grid, idft(spec), "coarse", signal.tag if signal.tag != "input" else None)


def coarse_array(values: np.ndarray, M_d: int) -> np.ndarray:
    """Frequency truncation of a fine-grid array (last axis) to M_d points."""
    v = np.asarray(values)
    spec = dft(v)[..., _coarse_bins(v.shape[-1], M_d)]
    out = idft(spec)
    return out.real if np.isrealobj(v) else out


def to_fine(signal: ComplexSignal) -> ComplexSignal:
    """Coarse -> fine by zero padding in the frequency domain (exact band-limited interpolation)."""
    if signal.level == "fine":
        return signal
    grid = signal.grid
    spec = np.zeros(grid.M, dtype=np.complex128)
    spec[_coarse_bins(grid.M, grid.M_d)] = dft(signal)
    return ComplexSignal(grid, idft(spec), "fine", None)


def forward_diff(values, dt: float) -> np.ndarray:
    """(g[i+1] - g[i]) / dt for i = 0..n-2."""
    g = np.asarray(values, dtype=float)
    if g.shape[-1] < 2:
        raise ValueError("forward_diff needs at least two values")
    return np.diff(g, axis=-1) / dt


def derivative_array(x, T: float, order: int) -> np.ndarray:
    """Spectral time derivative of periodic samples on a window of length T (last axis)."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    x = np.asarray(x)
    n = x.shape[-1]
    w = 2.0 * np.pi * np.fft.fftfreq(n, d=T / n)
    factor = (1j * w) ** order
    if order % 2 and n % 2 == 0:
        factor[n // 2] = 0.0  # odd derivatives of the unpaired Nyquist bin are not real-consistent
    out = np.fft.ifft(np.fft.fft(x, axis=-1) * factor, axis=-1)
    return out.real if np.isrealobj(x) else out


def spectral_derivative(signal: ComplexSignal, order: int) -> ComplexSignal:
    """First or second time derivative, exact for band-limited signals."""
    return signal.replace(derivative_array(signal.samples, signal.grid.T, order))


def avg_power(signal) -> float:
    """(1/T) int |X|^2 dt by the periodic trapezoid rule."""
    x = _samples(signal)
    return float(np.mean(np.abs(x) ** 2))


def avg_bandwidth(signal: ComplexSignal) -> float:
    """sqrt((1/(P T)) int |dX/dt|^2 dt) with a spectral derivative."""
    power = avg_power(signal)
    if power == 0.0:
        raise ValueError("bandwidth of a zero signal is undefined")
    xdot = derivative_array(signal.samples, signal.grid.T, 1)
    return float(np.sqrt(np.mean(np.abs(xdot) ** 2) / power))
