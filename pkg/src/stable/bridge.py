"""Stable bridge observed up to count n: weighted atoms plus a tilted-stable remainder."""
import math
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from src.errors import DomainError
from src.levy.models import GenGammaModel
from src.levy.sampling import sample_total_mass
from src.stable.closed_forms import bridge_block_count_pmf
from src.stable.models import StableBridgeDraw

NEG_INF = -math.inf


@lru_cache(maxsize=64)
def _log_completions(alpha: float, n: int, r: int) -> np.ndarray:
    """log T(m, k): total seating weight that takes m seated customers at k tables to n at r.

    T(n, r) = 1 and T(m, k) = (m - k alpha) T(m+1, k) + T(m+1, k+1).
    """
    table = np.full((n + 1, r + 2), NEG_INF)
    table[n, r] = 0.0
    for m in range(n - 1, 0, -1):
        for k in range(1, min(m, r) + 1):
            stay = math.log(m - k * alpha) + table[m + 1, k]
            table[m, k] = np.logaddexp(stay, table[m + 1, k + 1])
    return table


def sample_block_sizes_given_count(
    alpha: float, n: int, r: int, rng: np.random.Generator
) -> Tuple[int, ...]:
    """Block sizes of a PD(alpha, 0) partition of n conditioned on r blocks."""
    if not 1 <= r <= n:
        raise DomainError(f"need 1 <= r <= n, got n={n}, r={r}")
    table = _log_completions(float(alpha), n, r)
    sizes: List[int] = [1]
    for m in range(1, n):
        k = len(sizes)
        log_weights = [math.log(s - alpha) + table[m + 1, k] for s in sizes]
        log_weights.append(table[m + 1, k + 1] if k < r else NEG_INF)
        weights = np.exp(np.asarray(log_weights) - np.max(log_weights))
        choice = int(rng.choice(weights.size, p=weights / weights.sum()))
        if choice == k:
            sizes.append(1)
        else:
            sizes[choice] += 1
    return tuple(sizes)


def stable_bridge_sample(
    alpha: float, n: int, scale: float, rng: np.random.Generator
) -> StableBridgeDraw:
    """Atoms Gamma(N_k - alpha, 1) for K blocks, plus GG(alpha, alpha, 1) mass at time scale."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if not scale > 0.0:
        raise DomainError(f"scale must be positive, got {scale}")

    model = GenGammaModel(alpha=alpha, theta=alpha, zeta=1.0)
    remainder = float(sample_total_mass(model, scale, rng))
    if n == 0:
        return StableBridgeDraw(alpha=alpha, scale=scale, remainder=remainder)

    probs = bridge_block_count_pmf(alpha, n, scale)
    r = 1 + int(rng.choice(n, p=probs / probs.sum()))
    sizes = sample_block_sizes_given_count(alpha, n, r, rng)
    atoms = rng.gamma(shape=np.asarray(sizes, dtype=float) - alpha, scale=1.0)
    return StableBridgeDraw(
        alpha=alpha,
        scale=scale,
        block_sizes=sizes,
        atoms=tuple(float(a) for a in atoms),
        remainder=remainder,
    )


def diversity_normalizer(
    alpha: float, n: int, scale: float, rng: np.random.Generator, size: int
) -> np.ndarray:
    """(GG remainder + Gamma(n - K alpha, 1)) / scale^{1/alpha} with K from its bridge law."""
    model = GenGammaModel(alpha=alpha, theta=alpha, zeta=1.0)
    remainder = np.asarray(sample_total_mass(model, scale, rng, size=size))
    if n == 0:
        return remainder / scale ** (1.0 / alpha)
    probs = bridge_block_count_pmf(alpha, n, scale)
    k = 1 + rng.choice(n, size=size, p=probs / probs.sum())
    pooled = rng.gamma(shape=n - k * alpha, scale=1.0)
    return (remainder + pooled) / scale ** (1.0 / alpha)
