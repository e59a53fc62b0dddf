"""Gibbs weights Phi_{n,r} that tilt the stable EPPF p_beta into a Gibbs-type law."""
import math
from typing import Dict, Protocol

from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.special import gammaln

from src.errors import DomainError
from src.stable.closed_forms import log_poissonized_normalizer


class PhiWeight(Protocol):
    def log_weight(self, n: int, r: int) -> float:
        ...


def _check_range(n: int, r: int) -> None:
    if not 1 <= r <= n:
        raise DomainError(f"need 1 <= r <= n, got n={n}, r={r}")


def log_phi_weight_pd(beta: float, theta: float, n: int, r: int) -> float:
    """log Gamma(n)Gamma(t/b+r)Gamma(t+1) - log Gamma(r)Gamma(t/b+1)Gamma(t+n), t=theta, b=beta."""
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if not theta > -beta:
        raise DomainError(f"theta must exceed -beta, got beta={beta}, theta={theta}")
    _check_range(n, r)
    if theta == 0.0:
        return 0.0
    shift = theta / beta
    return float(
        gammaln(n)
        + gammaln(shift + r)
        + gammaln(theta + 1.0)
        - gammaln(r)
        - gammaln(shift + 1.0)
        - gammaln(theta + n)
    )


def phi_weight_pd(beta: float, theta: float, n: int, r: int) -> float:
    return math.exp(log_phi_weight_pd(beta, theta, n, r))


class PitmanYorPhi(BaseModel):
    """Weights of the power tilt h(t) = t^{-theta} / E[T^{-theta}]."""

    model_config = ConfigDict(frozen=True)

    beta: float
    theta: float = 0.0

    def log_weight(self, n: int, r: int) -> float:
        return log_phi_weight_pd(self.beta, self.theta, n, r)


class PoissonizedPhi(BaseModel):
    """Weights of the Poissonized stable law at latent time zeta."""

    model_config = ConfigDict(frozen=True)

    beta: float
    zeta: float = Field(gt=0.0)

    def log_weight(self, n: int, r: int) -> float:
        _check_range(n, r)
        head = r * math.log(self.zeta) - float(gammaln(r))
        return head - log_poissonized_normalizer(self.beta, n, self.zeta)


class TabulatedPhi(BaseModel):
    """User-supplied positive weights, ``table[n][r]``."""

    model_config = ConfigDict(frozen=True)

    table: Dict[int, Dict[int, float]]

    @field_validator("table")
    @classmethod
    def _positive(cls, value: Dict[int, Dict[int, float]]) -> Dict[int, Dict[int, float]]:
        for n, row in value.items():
            for r, weight in row.items():
                if not weight > 0.0:
                    raise ValueError(f"Phi[{n}][{r}] must be positive, got {weight}")
        return value

    def log_weight(self, n: int, r: int) -> float:
        _check_range(n, r)
        try:
            return math.log(self.table[n][r])
        except KeyError:
            raise DomainError(f"no tabulated weight for n={n}, r={r}") from None
