"""Laplace exponents, exponential cumulants and Levy densities.

Every family is evaluated through its generalized-gamma coordinates, so the
embeddings Stable(a) = GG(a, a, 0) and Gamma(t, z) = GG(0, t, z) share one
code path. The cumulant convention is psi^(c)(g) = int s^c e^{-sg} tau(s) ds.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from src.errors import DomainError
from src.levy.models import LevyModel


def check_gamma(gamma: float) -> float:
    if not (gamma > 0.0) or not math.isfinite(gamma):
        raise DomainError(f"evaluation point must be positive and finite, got {gamma}")
    return float(gamma)


def psi(model: LevyModel, gamma: float) -> float:
    gamma = check_gamma(gamma)
    alpha, theta, zeta = model.gg()
    if alpha == 0.0:
        return theta * math.log1p(gamma / zeta)
    if zeta == 0.0:
        return theta / alpha * gamma**alpha
    # (zeta+gamma)^a - zeta^a without cancellation for small alpha
    return theta / alpha * zeta**alpha * math.expm1(alpha * math.log1p(gamma / zeta))


def log_psi(model: LevyModel, gamma: float) -> float:
    return math.log(psi(model, gamma))


def log_psi_cumulant(model: LevyModel, c: int, gamma: float) -> float:
    """log psi^(c)(gamma) for c >= 1."""
    if c < 1:
        raise DomainError(f"cumulant order must be >= 1, got {c}")
    gamma = check_gamma(gamma)
    alpha, theta, zeta = model.gg()
    return float(
        math.log(theta)
        + gammaln(c - alpha)
        - gammaln(1.0 - alpha)
        + (alpha - c) * math.log(zeta + gamma)
    )


def log_psi_cumulants(model: LevyModel, n_max: int, gamma: float) -> np.ndarray:
    """Vector of log psi^(c)(gamma) for c = 1..n_max."""
    gamma = check_gamma(gamma)
    alpha, theta, zeta = model.gg()
    c = np.arange(1, n_max + 1, dtype=float)
    return (
        math.log(theta)
        + gammaln(c - alpha)
        - gammaln(1.0 - alpha)
        + (alpha - c) * math.log(zeta + gamma)
    )


def log_levy_density(model: LevyModel, s: float) -> float:
    if not s > 0.0:
        raise DomainError(f"jump size must be positive, got {s}")
    alpha, theta, zeta = model.gg()
    return float(
        math.log(theta) - (alpha + 1.0) * math.log(s) - zeta * s - gammaln(1.0 - alpha)
    )


@dataclass(frozen=True)
class CumulantTable:
    model: LevyModel
    gamma: float
    log_psi: float
    log_psi_c: Tuple[float, ...]

    @property
    def n_max(self) -> int:
        return len(self.log_psi_c)

    def log_cumulant(self, c: int) -> float:
        return self.log_psi_c[c - 1]


@lru_cache(maxsize=4096)
def cumulant_table(model: LevyModel, gamma: float, n_max: int) -> CumulantTable:
    values = log_psi_cumulants(model, n_max, gamma)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"non-finite cumulants for {model.describe()} at gamma={gamma}")
    return CumulantTable(
        model=model, gamma=gamma, log_psi=log_psi(model, gamma), log_psi_c=tuple(values)
    )
