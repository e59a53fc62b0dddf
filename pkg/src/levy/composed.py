"""Joint exponential cumulants of the composed subordinators sigma_j(sigma_0)."""
import math
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.special import logsumexp

from src.errors import DomainError
from src.levy.bell import xi_partial
from src.levy.cumulants import log_psi_cumulants

if TYPE_CHECKING:
    from src.phibp.models import HierModel

NEG_INF = -math.inf


def _log_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.full(a.size + b.size - 1, NEG_INF)
    for i, value in enumerate(a):
        if value == NEG_INF:
            continue
        out[i : i + b.size] = np.logaddexp(out[i : i + b.size], value + b)
    return out


def group_block_weights(hier: "HierModel", counts: Sequence[int]) -> np.ndarray:
    """log W(R) = log sum_{r: sum r_j = R} prod_j Xi^[n_j]_{r_j}(tau_j, gamma_j).

    Groups with n_j = 0 contribute the factor 1 at r_j = 0.
    """
    if len(counts) != hier.n_groups:
        raise DomainError(f"expected {hier.n_groups} counts, got {len(counts)}")
    weights = np.zeros(1)
    for model, gamma, n_j in zip(hier.taus, hier.gammas, counts):
        if n_j < 0:
            raise DomainError(f"counts must be nonnegative, got {n_j}")
        if n_j == 0:
            continue
        row = xi_partial(model, n_j, gamma).log_xi_partial[n_j]
        weights = _log_convolve(weights, row)
    return weights


def log_composed_cumulant(hier: "HierModel", counts: Sequence[int]) -> float:
    """log (Psi_0 o sum_j psi_j)^(n)(gamma) by the finite double-Bell expansion."""
    if not any(n > 0 for n in counts):
        raise DomainError("composed cumulant needs at least one positive count")
    weights = group_block_weights(hier, counts)
    r_max = weights.size - 1
    base = log_psi_cumulants(hier.tau0, r_max, hier.psi_total)
    return float(logsumexp(weights[1:] + base))
