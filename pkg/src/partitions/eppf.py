"""Pitman-Yor EPPFs and block-count laws, all in log scale.

EPPFs take block sizes only; labeled-partition probabilities are obtained by
the caller through explicit multiplicities.
"""
import math
from typing import Sequence

from scipy.special import gammaln

from src.errors import DomainError
from src.partitions.stirling import log_gen_stirling

NEG_INF = -math.inf


def _check_blocks(blocks: Sequence[int]) -> None:
    if len(blocks) == 0:
        raise DomainError("a partition needs at least one block")
    if any(b < 1 for b in blocks):
        raise DomainError(f"block sizes must be >= 1, got {tuple(blocks)}")


def _check_beta(beta: float) -> None:
    if not 0.0 <= beta < 1.0:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")


def _check_theta(beta: float, theta: float) -> None:
    if not theta > -beta:
        raise DomainError(f"theta must exceed -beta, got beta={beta}, theta={theta}")


def _log_block_weights(beta: float, blocks: Sequence[int]) -> float:
    # sum_l log (1 - beta)_{n_l - 1}
    return float(sum(gammaln(b - beta) - gammaln(1.0 - beta) for b in blocks))


def log_pd_eppf(beta: float, blocks: Sequence[int]) -> float:
    """p_beta(n_1..n_r) = beta^(r-1) Gamma(r)/Gamma(n) prod (1-beta)_{n_l-1}."""
    _check_beta(beta)
    _check_blocks(blocks)
    r, n = len(blocks), sum(blocks)
    if beta == 0.0:
        return 0.0 if r == 1 else NEG_INF
    return (
        (r - 1) * math.log(beta)
        + float(gammaln(r) - gammaln(n))
        + _log_block_weights(beta, blocks)
    )


def log_pd_theta_eppf(beta: float, theta: float, blocks: Sequence[int]) -> float:
    """PD(beta, theta) EPPF in Chinese-restaurant product form.

    prod_{i<r}(theta + i beta) / (theta + 1)_{n-1} * prod (1-beta)_{n_l-1}; this
    covers beta = 0 (Ewens) and negative theta without Gamma-ratio limits.
    """
    if theta == 0.0:
        return log_pd_eppf(beta, blocks)
    _check_beta(beta)
    _check_theta(beta, theta)
    _check_blocks(blocks)
    r, n = len(blocks), sum(blocks)
    seats = sum(math.log(theta + i * beta) for i in range(1, r))
    return (
        seats
        - float(gammaln(theta + n) - gammaln(theta + 1.0))
        + _log_block_weights(beta, blocks)
    )


def log_block_count_pmf(beta: float, n: int, k: int) -> float:
    """log P(K_n = k) under PD(beta, 0): beta^(k-1) Gamma(k)/Gamma(n) S_beta(n,k)."""
    _check_beta(beta)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    if beta == 0.0:
        return 0.0 if k == 1 else NEG_INF
    return (
        (k - 1) * math.log(beta)
        + float(gammaln(k) - gammaln(n))
        + log_gen_stirling(beta, n, k)
    )


def block_count_pmf(beta: float, n: int, k: int) -> float:
    return math.exp(log_block_count_pmf(beta, n, k))


def log_pd_theta_block_count_pmf(beta: float, theta: float, n: int, k: int) -> float:
    """log P(K_n = k) under PD(beta, theta)."""
    if theta == 0.0:
        return log_block_count_pmf(beta, n, k)
    _check_beta(beta)
    _check_theta(beta, theta)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    seats = sum(math.log(theta + i * beta) for i in range(1, k))
    return (
        seats
        - float(gammaln(theta + n) - gammaln(theta + 1.0))
        + log_gen_stirling(beta, n, k)
    )


def pd_theta_block_count_pmf(beta: float, theta: float, n: int, k: int) -> float:
    return math.exp(log_pd_theta_block_count_pmf(beta, theta, n, k))


def log_frag_block_count_pmf(alpha: float, beta: float, n: int, k: int) -> float:
    """log P(K_n = k) under PD(alpha, -beta), 0 < beta < alpha < 1."""
    if not 0.0 < beta < alpha < 1.0:
        raise DomainError(f"need 0 < beta < alpha < 1, got alpha={alpha}, beta={beta}")
    ratio = beta / alpha
    return float(
        gammaln(n)
        + gammaln(k - ratio)
        + gammaln(1.0 - beta)
        - gammaln(k)
        - gammaln(1.0 - ratio)
        - gammaln(n - beta)
    ) + log_block_count_pmf(alpha, n, k)


def frag_block_count_pmf(alpha: float, beta: float, n: int, k: int) -> float:
    return math.exp(log_frag_block_count_pmf(alpha, beta, n, k))
