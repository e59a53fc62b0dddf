"""Moments and count laws of the coupled hierarchy."""
import math
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from src.errors import DomainError
from src.levy.bell import log_base_moment, xi_partial
from src.levy.composed import group_block_weights, log_composed_cumulant
from src.levy.cumulants import psi
from src.phibp.models import HierModel


def _as_counts(hier: HierModel, counts: Sequence[int]) -> Tuple[int, ...]:
    counts = tuple(int(n) for n in counts)
    if len(counts) != hier.n_groups:
        raise DomainError(f"expected {hier.n_groups} counts, got {len(counts)}")
    if any(n < 0 for n in counts):
        raise DomainError(f"counts must be nonnegative, got {counts}")
    return counts


@lru_cache(maxsize=65536)
def _log_hier_joint_moment(hier: HierModel, counts: Tuple[int, ...]) -> float:
    u = hier.psi_total
    log_laplace = -psi(hier.tau0, u)
    if not any(counts):
        return log_laplace
    weights = group_block_weights(hier, counts)
    r_max = weights.size - 1
    base = xi_partial(hier.tau0, r_max, u)
    terms = [w + base.log_xi_total(1.0, r) for r, w in enumerate(weights) if w > -math.inf]
    return log_laplace + float(logsumexp(terms))


def log_hier_joint_moment(hier: HierModel, counts: Sequence[int]) -> float:
    """log E[prod_j sigma_j(sigma_0(1))^{n_j} exp(-sum_v gamma_v sigma_v(sigma_0(1)))]."""
    return _log_hier_joint_moment(hier, _as_counts(hier, counts))


@lru_cache(maxsize=65536)
def _cached_composed(hier: HierModel, counts: Tuple[int, ...]) -> float:
    return log_composed_cumulant(hier, counts)


def log_composed(hier: HierModel, counts: Sequence[int]) -> float:
    return _cached_composed(hier, _as_counts(hier, counts))


def _log_count_prefactor(hier: HierModel, counts: Sequence[int]) -> float:
    return sum(
        n * math.log(g) - float(gammaln(n + 1)) for n, g in zip(counts, hier.gammas)
    )


def log_joint_count_pmf(hier: HierModel, counts: Sequence[int]) -> float:
    """log P(Z_j(gamma_j, 1) = n_j for all j)."""
    counts = _as_counts(hier, counts)
    return _log_count_prefactor(hier, counts) + log_hier_joint_moment(hier, counts)


def joint_count_pmf(hier: HierModel, counts: Sequence[int]) -> float:
    return math.exp(log_joint_count_pmf(hier, counts))


def log_allocation_pmf(hier: HierModel, fine_counts: Sequence[int]) -> float:
    """log P(K_j = K_j for all j), fine-block counts per group."""
    fine_counts = _as_counts(hier, fine_counts)
    u = hier.psi_total
    prefactor = sum(
        k * math.log(p) - float(gammaln(k + 1)) for k, p in zip(fine_counts, hier.psis)
    )
    return prefactor + log_base_moment(hier.tau0, sum(fine_counts), u)


def allocation_pmf(hier: HierModel, fine_counts: Sequence[int]) -> float:
    return math.exp(log_allocation_pmf(hier, fine_counts))


def log_fragment_count_pmf(hier: HierModel, species_counts: Sequence[int]) -> float:
    """log P(count vector of one observed species = n_l)."""
    species_counts = _as_counts(hier, species_counts)
    if not any(species_counts):
        raise DomainError("an observed species has at least one individual")
    return (
        _log_count_prefactor(hier, species_counts)
        + log_composed(hier, species_counts)
        - math.log(hier.species_mass)
    )


def fragment_count_pmf(hier: HierModel, species_counts: Sequence[int]) -> float:
    return math.exp(log_fragment_count_pmf(hier, species_counts))


def species_count_pmf(hier: HierModel, r: int) -> float:
    """P(phi = r), Poisson with mean Psi_0(sum_j psi_j)."""
    mass = hier.species_mass
    return math.exp(r * math.log(mass) - mass - float(gammaln(r + 1)))


def count_grid(hier: HierModel, cap: int) -> np.ndarray:
    """Joint count pmf on {0..cap}^J (J <= 2)."""
    if hier.n_groups == 1:
        return np.array([joint_count_pmf(hier, (n,)) for n in range(cap + 1)])
    if hier.n_groups == 2:
        return np.array(
            [[joint_count_pmf(hier, (a, b)) for b in range(cap + 1)] for a in range(cap + 1)]
        )
    raise DomainError("count grids are tabulated for at most two groups")
