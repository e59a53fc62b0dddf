"""Finite Gibbs laws of a subordinator observed up to count n at time lambda."""
import math
from typing import Sequence

from scipy.special import gammaln

from src.errors import DomainError
from src.levy.bell import xi_partial
from src.levy.cumulants import log_psi_cumulant, psi
from src.levy.models import LevyModel


def log_finite_gibbs_eppf(
    model: LevyModel, lam: float, gamma: float, blocks: Sequence[int]
) -> float:
    """lambda^r prod psi^(n_l)(gamma) / Xi^[n](lambda tau, gamma)."""
    if not blocks or any(b < 1 for b in blocks):
        raise DomainError(f"invalid block sizes {tuple(blocks)}")
    n = sum(blocks)
    table = xi_partial(model, n, gamma)
    head = len(blocks) * math.log(lam) + sum(log_psi_cumulant(model, b, gamma) for b in blocks)
    return head - table.log_xi_total(lam)


def log_frag_num_blocks_pmf(model: LevyModel, lam: float, gamma: float, n: int, x: int) -> float:
    """log P(x fine blocks | n individuals, H = lambda)."""
    if not 1 <= x <= n:
        raise DomainError(f"need 1 <= x <= n, got n={n}, x={x}")
    table = xi_partial(model, n, gamma)
    return x * math.log(lam) + table.log_xi(x) - table.log_xi_total(lam)


def log_conditional_group_count_pmf(model: LevyModel, lam: float, gamma: float, n: int) -> float:
    """log P(N = n | N >= 1, H = lambda) for one group of a species with jump lambda."""
    if n < 1:
        raise DomainError(f"count must be >= 1, got {n}")
    mass = lam * psi(model, gamma)
    table = xi_partial(model, n, gamma)
    return (
        n * math.log(gamma)
        - float(gammaln(n + 1))
        - mass
        + table.log_xi_total(lam)
        - math.log(-math.expm1(-mass))
    )
