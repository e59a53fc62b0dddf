"""EPPFs with the sampling times integrated out against the arrival-time law."""
import math
from typing import Literal, Tuple

from scipy.special import gammaln

from src.errors import DomainError
from src.levy.bell import log_base_moment
from src.levy.cumulants import psi
from src.numerics.envelope import QuadratureEnvelope
from src.numerics.quadrature import QuadResult, integrate_half_line_nd
from src.phibp.counts import log_composed
from src.phibp.laws import log_fine_cumulants, log_p_coag, log_p_frag
from src.phibp.models import HierModel, NestedConfig

Side = Literal["coarse", "fine", "joint", "joint_frag"]

MAX_QUADRATURE_GROUPS = 3


def _log_time_weight(config: NestedConfig, gammas: Tuple[float, ...]) -> float:
    # prod_j gamma_j^{n_j - 1} / Gamma(n_j)
    return sum(
        (n - 1) * math.log(g) - float(gammaln(n))
        for n, g in zip(config.group_totals, gammas)
    )


def _log_fine_integrand(config: NestedConfig, at: HierModel) -> float:
    return log_base_moment(at.tau0, config.k_tilde, at.psi_total) + log_fine_cumulants(config, at)


def _log_coarse_integrand(config: NestedConfig, at: HierModel) -> float:
    return -psi(at.tau0, at.psi_total) + sum(
        log_composed(at, config.species_counts(ell)) for ell in range(config.r)
    )


def marginal_eppf_integrand(
    config: NestedConfig, hier: HierModel, side: Side, gammas: Tuple[float, ...]
) -> float:
    """log of (conditional EPPF) x (arrival-time density) at the times gammas."""
    at = hier.with_gammas(gammas)
    head = _log_time_weight(config, at.gammas)
    if side == "fine":
        return head + _log_fine_integrand(config, at)
    if side == "coarse":
        return head + _log_coarse_integrand(config, at)
    if side == "joint":
        return head + _log_fine_integrand(config, at) + log_p_coag(config, at)
    if side == "joint_frag":
        return head + _log_coarse_integrand(config, at) + log_p_frag(config, at)
    raise DomainError(f"unknown side {side!r}")


def marginal_eppf_quad(
    config: NestedConfig,
    hier: HierModel,
    side: Side = "coarse",
    envelope: QuadratureEnvelope | None = None,
) -> QuadResult:
    """Integrate the conditional EPPF over the sampling times.

    The sampling times stored in ``hier`` are ignored; each axis runs over
    (0, inf) through the map u = g / (1 + g).
    """
    if config.n_groups != hier.n_groups:
        raise DomainError("configuration and model disagree on the number of groups")
    if any(n < 1 for n in config.group_totals):
        raise DomainError("marginal EPPFs need n_j >= 1 in every group")
    if hier.n_groups > MAX_QUADRATURE_GROUPS:
        raise DomainError(f"tensor quadrature supports at most {MAX_QUADRATURE_GROUPS} groups")
    return integrate_half_line_nd(
        lambda gammas: marginal_eppf_integrand(config, hier, side, gammas),
        hier.n_groups,
        envelope,
    )


def marginal_eppf(
    config: NestedConfig,
    hier: HierModel,
    side: Side = "coarse",
    envelope: QuadratureEnvelope | None = None,
) -> float:
    """Marginal EPPF as a probability."""
    return marginal_eppf_quad(config, hier, side, envelope).value
