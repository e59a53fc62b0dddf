"""The four conditional laws of the coupled hierarchy and the duality residual.

Given totals n_j >= 1 per group, the nested configuration can be built two
ways: fine blocks first, then coagulated into species (p_fine, p_coag), or
species counts first, then fragmented into fine blocks (p_coarse, p_frag).
The identity p_coag p_fine = p_frag p_coarse holds exactly.
"""
import math
from fractions import Fraction
from typing import Tuple
from dataclasses import dataclass

from src.errors import DomainError
from src.levy.bell import log_base_moment
from src.levy.cumulants import log_psi_cumulant
from src.phibp.counts import log_composed, log_hier_joint_moment
from src.phibp.models import HierModel, NestedConfig


def _check_compatible(config: NestedConfig, hier: HierModel) -> None:
    if config.n_groups != hier.n_groups:
        raise DomainError(
            f"configuration has {config.n_groups} groups, model has {hier.n_groups}"
        )


def _require_observed_groups(config: NestedConfig) -> None:
    if any(n == 0 for n in config.group_totals):
        raise DomainError(
            f"every group needs at least one individual, totals {config.group_totals}"
        )


def log_fine_cumulants(config: NestedConfig, hier: HierModel) -> float:
    return sum(
        log_psi_cumulant(model, c, gamma)
        for j, (model, gamma) in enumerate(zip(hier.taus, hier.gammas))
        for c in config.fine_blocks(j)
    )


def log_p_fine(config: NestedConfig, hier: HierModel) -> float:
    """Law of the fine blocks (c_{j,k}) given the totals n_j."""
    _check_compatible(config, hier)
    _require_observed_groups(config)
    u = hier.psi_total
    numerator = log_base_moment(hier.tau0, config.k_tilde, u) + log_fine_cumulants(config, hier)
    return numerator - log_hier_joint_moment(hier, config.group_totals)


def log_p_coag(config: NestedConfig, hier: HierModel) -> float:
    """Law of the species allocation (x~_l) of K~ fine blocks."""
    _check_compatible(config, hier)
    u = hier.psi_total
    x_tilde = config.x_tilde
    if any(x == 0 for x in x_tilde):
        raise DomainError("every species needs at least one fine block")
    head = -hier.species_mass + sum(log_psi_cumulant(hier.tau0, x, u) for x in x_tilde)
    return head - log_base_moment(hier.tau0, config.k_tilde, u)


def log_p_frag_species(config: NestedConfig, hier: HierModel, ell: int) -> float:
    """Fragmentation factor of one species."""
    u = hier.psi_total
    x_tilde = config.x_tilde[ell]
    numerator = log_psi_cumulant(hier.tau0, x_tilde, u) + sum(
        log_psi_cumulant(model, c, gamma)
        for j, (model, gamma) in enumerate(zip(hier.taus, hier.gammas))
        for c in config.refinements[j][ell]
    )
    return numerator - log_composed(hier, config.species_counts(ell))


def log_p_frag(config: NestedConfig, hier: HierModel) -> float:
    """Law of the refinements given the species count vectors."""
    _check_compatible(config, hier)
    return sum(log_p_frag_species(config, hier, ell) for ell in range(config.r))


def log_p_coarse(config: NestedConfig, hier: HierModel) -> float:
    """Law of the species count vectors (n_{j,l}) given the totals n_j."""
    _check_compatible(config, hier)
    _require_observed_groups(config)
    head = -hier.species_mass + sum(
        log_composed(hier, config.species_counts(ell)) for ell in range(config.r)
    )
    return head - log_hier_joint_moment(hier, config.group_totals)


@dataclass(frozen=True)
class DualitySides:
    log_coag: float
    log_fine: float
    log_frag: float
    log_coarse: float

    @property
    def log_lhs(self) -> float:
        return self.log_coag + self.log_fine

    @property
    def log_rhs(self) -> float:
        return self.log_frag + self.log_coarse

    @property
    def residual(self) -> float:
        return abs(self.log_lhs - self.log_rhs)


def duality_sides(config: NestedConfig, hier: HierModel) -> DualitySides:
    return DualitySides(
        log_coag=log_p_coag(config, hier),
        log_fine=log_p_fine(config, hier),
        log_frag=log_p_frag(config, hier),
        log_coarse=log_p_coarse(config, hier),
    )


def duality_residual(config: NestedConfig, hier: HierModel) -> float:
    """|log(p_coag p_fine) - log(p_frag p_coarse)|."""
    return duality_sides(config, hier).residual


def exact_prefactors(config: NestedConfig) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Multiplicities that lift each EPPF to the labeled law, as exact fractions.

    coag: prod K_j! / (r! prod x_{j,l}!); fine: prod n_j! / (prod K_j! prod c!);
    frag: prod n_{j,l}! / (x_{j,l}! prod c!); coarse: prod n_j! / (r! prod n_{j,l}!).
    """
    fact = math.factorial

    def prod(values: list) -> int:
        out = 1
        for v in values:
            out *= fact(v)
        return out

    c_all = [c for j in range(config.n_groups) for c in config.fine_blocks(j)]
    p_c = prod(c_all)
    p_x = prod([x for row in config.x for x in row])
    p_njl = prod([n for row in config.counts for n in row])
    p_k = prod(list(config.fine_counts))
    p_n = prod(list(config.group_totals))
    r_fact = fact(config.r)
    return (
        Fraction(p_k, r_fact * p_x),
        Fraction(p_n, p_k * p_c),
        Fraction(p_njl, p_x * p_c),
        Fraction(p_n, r_fact * p_njl),
    )
