"""Exception hierarchy for the duality engine."""
from typing import Optional


class PhibpError(Exception):
    """Base class for engine errors."""


class DomainError(PhibpError, ValueError):
    """Parameter or argument outside the domain of an operation."""


class RetryLimitError(PhibpError):
    """A rejection sampler exhausted its attempt cap."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class QuadratureError(PhibpError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, abserr: float = float("nan"), neval: int = 0):
        super().__init__(message)
        self.abserr = abserr
        self.neval = neval


class EnvelopeError(PhibpError):
    """Enumeration or exact-sampling size cap exceeded."""


class SamplerCapError(EnvelopeError):
    """A draw would materialize more sub-blocks than allowed."""


class ConfigError(PhibpError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
