"""Densities of the base jumps and arrival times, and the block-count posterior."""
import math
from typing import Sequence

import numpy as np

from src.errors import DomainError
from src.levy.bell import xi_partial
from src.levy.cumulants import log_levy_density
from src.levy.models import LevyModel
from src.levy.mtp import mtp_pmf
from src.phibp.counts import fragment_count_pmf, joint_count_pmf, log_composed
from src.phibp.models import HierModel


def log_h_conditional_density(hier: HierModel, species_counts: Sequence[int], lam: float) -> float:
    """Density of the base jump H_l of a species with count vector n_l."""
    if not lam > 0.0:
        raise DomainError(f"jump size must be positive, got {lam}")
    if not any(species_counts):
        raise DomainError("an observed species has at least one individual")
    total = log_levy_density(hier.tau0, lam)
    for model, gamma, psi_j, n in zip(hier.taus, hier.gammas, hier.psis, species_counts):
        total -= lam * psi_j
        if n > 0:
            total += xi_partial(model, n, gamma).log_xi_total(lam)
    return total - log_composed(hier, species_counts)


def h_conditional_density(hier: HierModel, species_counts: Sequence[int], lam: float) -> float:
    return math.exp(log_h_conditional_density(hier, species_counts, lam))


def h_marginal_density(hier: HierModel, lam: float) -> float:
    """Density of the base jump of an observed species, mixing over its counts."""
    u = hier.psi_total
    return math.exp(log_levy_density(hier.tau0, lam)) * -math.expm1(-lam * u) / hier.species_mass


def mtp_convolution_powers(model: LevyModel, gamma: float, n: int) -> np.ndarray:
    """conv[x, m] = P(C_1 + ... + C_x = m) for C_i iid MtP, 0 <= x, m <= n."""
    single = np.zeros(n + 1)
    single[1:] = [mtp_pmf(model, gamma, c) for c in range(1, n + 1)]
    conv = np.zeros((n + 1, n + 1))
    conv[0, 0] = 1.0
    for x in range(1, n + 1):
        conv[x] = np.convolve(conv[x - 1], single)[: n + 1]
    return conv


def x_given_count_pmf(hier: HierModel, n: int, x: int) -> float:
    """P(X~_l = x | species count n_l = n) for one group.

    P(X~ = x) P(C_1 + ... + C_x = n) / P(n_l = n), with the x-fold MtP
    convolution computed directly.
    """
    if hier.n_groups != 1:
        raise DomainError("the block-count posterior is defined for a single group")
    if not 1 <= x <= n:
        raise DomainError(f"need 1 <= x <= n, got n={n}, x={x}")
    tau1, gamma1 = hier.taus[0], hier.gammas[0]
    prior = mtp_pmf(hier.tau0, hier.psi_total, x)
    conv = mtp_convolution_powers(tau1, gamma1, n)
    return prior * conv[x, n] / fragment_count_pmf(hier, (n,))


def arrival_density(hier: HierModel, counts: Sequence[int], gammas: Sequence[float]) -> float:
    """Joint density of the n_j-th arrival times T_j evaluated at gamma_j."""
    if any(n < 1 for n in counts):
        raise DomainError("arrival times need n_j >= 1 in every group")
    at = hier.with_gammas(gammas)
    scale = math.prod(n / g for n, g in zip(counts, at.gammas))
    return scale * joint_count_pmf(at, counts)


def log_arrival_density(hier: HierModel, counts: Sequence[int], gammas: Sequence[float]) -> float:
    value = arrival_density(hier, counts, gammas)
    return math.log(value) if value > 0 else -math.inf
