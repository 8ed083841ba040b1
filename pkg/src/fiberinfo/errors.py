"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class FiberInfoError(Exception):
    """Base class for all library errors."""


class InvalidBandwidthError(FiberInfoError, ValueError):
    """A bandwidth argument is non-positive or exceeds the grid cutoff."""


class DomainError(FiberInfoError, ValueError):
    """Inputs fall outside the model's domain (perturbative gate, x <= 0 for K0, ...)."""


class DegenerateSignalError(FiberInfoError, ValueError):
    """The input envelope is too close to zero to decompose."""


class DivergenceError(FiberInfoError, ArithmeticError):
    """Split-step integration produced a non-finite field."""

    def __init__(self, step: int):
        super().__init__(f"split-step integration diverged at step {step}")
        self.step = step


class QuadratureError(FiberInfoError, ArithmeticError):
    """A quadrature failed to reach its tolerance."""


class IncompleteEnsembleError(FiberInfoError, KeyError):
    """An ensemble averager lacks functionals required by a formula."""

    def __init__(self, missing):
        self.missing = tuple(missing)
        super().__init__("missing ensemble averages: " + ", ".join(self.missing))


class ConfigError(FiberInfoError, ValueError):
    """A configuration or input file could not be parsed."""


class PerturbativeWarning(UserWarning):
    """A dimensionless group is in the range where first-order results degrade."""
