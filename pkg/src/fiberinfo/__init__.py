"""Mutual information of a dispersive nonlinear fiber channel to first order in dispersion."""

from .errors import (ConfigError, DegenerateSignalError, DivergenceError, DomainError, FiberInfoError,
                     IncompleteEnsembleError, InvalidBandwidthError, PerturbativeWarning, QuadratureError)
from .grid import ComplexSignal, GridSpec
from .kernels import BACKEND
from .propagation import ChannelParams

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChannelParams", "ComplexSignal", "GridSpec", "ConfigError", "DegenerateSignalError",
    "DivergenceError", "DomainError", "FiberInfoError", "IncompleteEnsembleError",
    "InvalidBandwidthError", "PerturbativeWarning", "QuadratureError",
]
