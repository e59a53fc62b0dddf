"""Closed-form count laws and mixing densities of the stable-in-stable hierarchy."""
import math
from typing import List

import numpy as np
from scipy.special import gammaln, logsumexp

from src.errors import DomainError
from src.partitions.eppf import (
    log_block_count_pmf,
    log_frag_block_count_pmf,
    log_pd_theta_block_count_pmf,
)

NEG_INF = -math.inf


def _check_positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise DomainError(f"{name} must be positive, got {value}")


def log_poissonized_normalizer(beta: float, n: int, zeta: float) -> float:
    """log sum_k P_beta^(n)(k) zeta^k / Gamma(k)."""
    _check_positive("zeta", zeta)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    log_zeta = math.log(zeta)
    terms = [
        log_block_count_pmf(beta, n, k) + k * log_zeta - float(gammaln(k))
        for k in range(1, n + 1)
    ]
    return float(logsumexp(terms))


def log_stable_count_pmf(beta: float, zeta: float, n: int) -> float:
    """log P(N = n) for the total count when Psi_0(sum psi) = zeta."""
    _check_positive("zeta", zeta)
    if n < 0:
        raise DomainError(f"count must be nonnegative, got {n}")
    if n == 0:
        return -zeta
    head = float(gammaln(n) - gammaln(n + 1)) + math.log(beta) - zeta
    return head + log_poissonized_normalizer(beta, n, zeta)


def stable_count_pmf(beta: float, zeta: float, n: int) -> float:
    return math.exp(log_stable_count_pmf(beta, zeta, n))


def log_stable_allocation_pmf(alpha: float, beta: float, zeta: float, k: int) -> float:
    """log P(K = k) for the number of fine blocks."""
    if not 0.0 < beta < alpha < 1.0:
        raise DomainError(f"need 0 < beta < alpha < 1, got alpha={alpha}, beta={beta}")
    return log_stable_count_pmf(beta / alpha, zeta, k)


def stable_allocation_pmf(alpha: float, beta: float, zeta: float, k: int) -> float:
    return math.exp(log_stable_allocation_pmf(alpha, beta, zeta, k))


def scaled_h_density(alpha: float, beta: float, n: int, w: float) -> float:
    """Density of zeta^{alpha/beta} H for a species with count n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    _check_positive("w", w)
    ratio = beta / alpha
    terms = [
        log_frag_block_count_pmf(alpha, beta, n, x)
        + (x - ratio - 1.0) * math.log(w)
        - w
        - float(gammaln(x - ratio))
        for x in range(1, n + 1)
    ]
    return math.exp(float(logsumexp(terms)))


def log_arrival_mixing_density(beta: float, theta: float, n: int, zeta: float) -> float:
    """log sum_k P(K_n = k) zeta^{theta/beta + k - 1} e^{-zeta} / Gamma(theta/beta + k)."""
    _check_positive("zeta", zeta)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    shift = theta / beta
    log_zeta = math.log(zeta)
    terms = [
        log_pd_theta_block_count_pmf(beta, theta, n, k)
        + (shift + k - 1.0) * log_zeta
        - zeta
        - float(gammaln(shift + k))
        for k in range(1, n + 1)
    ]
    return float(logsumexp(terms))


def arrival_mixing_density(beta: float, theta: float, n: int, zeta: float) -> float:
    return math.exp(log_arrival_mixing_density(beta, theta, n, zeta))


def bridge_block_count_pmf(alpha: float, n: int, scale: float) -> np.ndarray:
    """P(K = r), r = 1..n, proportional to P_alpha^(n)(r) scale^r / Gamma(r)."""
    _check_positive("scale", scale)
    log_scale = math.log(scale)
    terms: List[float] = [
        log_block_count_pmf(alpha, n, r) + r * log_scale - float(gammaln(r))
        for r in range(1, n + 1)
    ]
    weights = np.asarray(terms)
    return np.exp(weights - logsumexp(weights))
