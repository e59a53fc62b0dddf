"""Total-mass samplers sigma(lambda) for the built-in families."""
import math

import numpy as np

from src.errors import DomainError, RetryLimitError
from src.levy.models import LevyModel
from src.numerics.envelope import get_numeric_envelope


def positive_stable(alpha: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Kanter's representation: E exp(-s S) = exp(-s^alpha)."""
    u = rng.uniform(0.0, math.pi, size)
    e = rng.standard_exponential(size)
    log_s = (
        np.log(np.sin(alpha * u))
        - np.log(np.sin(u)) / alpha
        + (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * u)) - np.log(e))
    )
    return np.exp(log_s)


def sample_total_mass(
    model: LevyModel,
    lam: float,
    rng: np.random.Generator,
    size: int | None = None,
    max_attempts: int | None = None,
) -> np.ndarray | float:
    """Draw sigma(lam).

    Gamma draws are exact. Generalized gamma draws come from the untilted
    stable law with Laplace exponent (lam theta / alpha) g^alpha, accepted with
    probability exp(-zeta s); the expected number of attempts grows like
    exp(lam theta zeta^alpha / alpha).
    """
    if not lam > 0.0:
        raise DomainError(f"time must be positive, got {lam}")
    n = 1 if size is None else size
    alpha, theta, zeta = model.gg()

    if alpha == 0.0:
        out = rng.gamma(shape=lam * theta, scale=1.0 / zeta, size=n)
    else:
        scale = (lam * theta / alpha) ** (1.0 / alpha)
        if zeta == 0.0:
            out = scale * positive_stable(alpha, rng, n)
        else:
            cap = max_attempts or get_numeric_envelope().gengamma.max_attempts
            out = _tilted_rejection(alpha, scale, zeta, rng, n, cap)

    if size is None:
        return float(out[0])
    return out


def _tilted_rejection(
    alpha: float,
    scale: float,
    zeta: float,
    rng: np.random.Generator,
    n: int,
    max_attempts: int,
) -> np.ndarray:
    out = np.empty(n)
    pending = np.arange(n)
    attempts = 0
    while pending.size:
        attempts += 1
        if attempts > max_attempts:
            raise RetryLimitError(
                f"tilted-stable rejection exceeded {max_attempts} attempts "
                f"(zeta={zeta}, scale={scale:.4g})",
                attempts=max_attempts,
            )
        proposal = scale * positive_stable(alpha, rng, pending.size)
        accept = rng.standard_exponential(pending.size) >= zeta * proposal
        out[pending[accept]] = proposal[accept]
        pending = pending[~accept]
    return out
