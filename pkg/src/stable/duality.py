"""Gibbs duality, the master equation and Pitman-Yor recovery for stable laws.

Nested partitions here have one group: x_l fine blocks per species, fine
block sizes c and species counts n_l. The Gibbs form of the duality reads

    p_{b/a}(x) Phi_{n,r} / M  *  p_a(c) M  =  prod_l p_{a,-b}(c_l)  *  p_b(n) Phi_{n,r}

with M = sum_j P_{b/a}^(K)(j) Phi_{n,j}. The Poissonized weights turn each
factor into the conditional laws of the stable-in-stable hierarchy.
"""
import math
from dataclasses import dataclass
from typing import Optional

from scipy.special import logsumexp

from src.errors import DomainError
from src.levy.models import StableModel
from src.numerics.quadrature import integrate_half_line
from src.partitions.eppf import log_block_count_pmf, log_pd_eppf, log_pd_theta_eppf
from src.phibp.laws import DualitySides, duality_sides, log_p_frag_species
from src.phibp.models import HierModel, NestedConfig
from src.stable.closed_forms import log_arrival_mixing_density
from src.stable.models import StableDualityParams
from src.stable.phi import PhiWeight, PitmanYorPhi, PoissonizedPhi, log_phi_weight_pd


def _single_group(config: NestedConfig) -> None:
    if config.n_groups != 1:
        raise DomainError(f"stable duality is stated for one group, got {config.n_groups}")


def log_gibbs_mixing(params: StableDualityParams, n: int, k: int, phi: PhiWeight) -> float:
    """log sum_j P_{beta/alpha}^(K)(j) Phi_{n,j}."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= K <= n, got n={n}, K={k}")
    terms = [
        log_block_count_pmf(params.ratio, k, j) + phi.log_weight(n, j) for j in range(1, k + 1)
    ]
    return float(logsumexp(terms))


def log_gibbs_mixing_closed_form(params: StableDualityParams, n: int, k: int) -> float:
    """The alpha-level power-tilt weight that the mixing sum collapses to."""
    return log_phi_weight_pd(params.alpha, params.theta, n, k)


def gibbs_mixing_residual(params: StableDualityParams, n: int, k: int) -> float:
    phi = PitmanYorPhi(beta=params.beta, theta=params.theta)
    mixed = log_gibbs_mixing(params, n, k, phi)
    return abs(mixed - log_gibbs_mixing_closed_form(params, n, k))


def gibbs_duality_sides(
    params: StableDualityParams, config: NestedConfig, phi: PhiWeight
) -> DualitySides:
    _single_group(config)
    n = config.group_totals[0]
    k = config.k_tilde
    r = config.r
    log_phi = phi.log_weight(n, r)
    mixing = log_gibbs_mixing(params, n, k, phi)
    frag = sum(
        log_pd_theta_eppf(params.alpha, -params.beta, config.refinements[0][ell])
        for ell in range(r)
    )
    return DualitySides(
        log_coag=log_pd_eppf(params.ratio, config.x_tilde) + log_phi - mixing,
        log_fine=log_pd_eppf(params.alpha, config.fine_blocks(0)) + mixing,
        log_frag=frag,
        log_coarse=log_pd_eppf(params.beta, config.counts[0]) + log_phi,
    )


def gibbs_duality_residual(
    params: StableDualityParams, config: NestedConfig, phi: Optional[PhiWeight] = None
) -> float:
    phi = phi or PitmanYorPhi(beta=params.beta, theta=params.theta)
    return gibbs_duality_sides(params, config, phi).residual


def master_factors(
    params: StableDualityParams, config: NestedConfig, zeta: Optional[float] = None
) -> DualitySides:
    """The four zeta-indexed factors: coag, fine, frag (zeta-free) and coarse."""
    phi = PoissonizedPhi(beta=params.beta, zeta=params.at_zeta(zeta))
    return gibbs_duality_sides(params, config, phi)


def master_duality_residual(
    params: StableDualityParams, config: NestedConfig, zeta: Optional[float] = None
) -> float:
    return master_factors(params, config, zeta).residual


def stable_hierarchy(params: StableDualityParams, zeta: Optional[float] = None) -> HierModel:
    """tau0 = Stable(beta/alpha), tau1 = Stable(alpha), gamma = zeta^{1/beta}."""
    gamma = params.at_zeta(zeta) ** (1.0 / params.beta)
    return HierModel(
        tau0=StableModel(alpha=params.ratio),
        taus=(StableModel(alpha=params.alpha),),
        gammas=(gamma,),
    )


def stable_reduction_gap(
    params: StableDualityParams, config: NestedConfig, zeta: Optional[float] = None
) -> float:
    """Largest log gap between the master factors and the general conditional laws."""
    factors = master_factors(params, config, zeta)
    laws = duality_sides(config, stable_hierarchy(params, zeta))
    return max(
        abs(factors.log_coag - laws.log_coag),
        abs(factors.log_fine - laws.log_fine),
        abs(factors.log_frag - laws.log_frag),
        abs(factors.log_coarse - laws.log_coarse),
    )


def frag_invariance_check(alpha: float, beta: float, n_l: int, composition: tuple) -> float:
    """Gap between the stable-in-stable fragmentation factor and the PD(alpha, -beta) EPPF."""
    composition = tuple(int(c) for c in composition)
    if sum(composition) != n_l or any(c < 1 for c in composition):
        raise DomainError(f"{composition} is not a composition of {n_l}")
    params = StableDualityParams(alpha=alpha, beta=beta)
    config = NestedConfig(refinements=((composition,),))
    factor = log_p_frag_species(config, stable_hierarchy(params), 0)
    return abs(factor - log_pd_theta_eppf(alpha, -beta, composition))


@dataclass(frozen=True)
class PitmanRecovery:
    """Both quadrature paths and the closed-form Pitman-Yor products."""

    coag_path: float
    frag_path: float
    closed_form_coag: float
    closed_form_frag: float
    abserr: float

    @property
    def path_gap(self) -> float:
        return abs(self.coag_path - self.frag_path)

    @property
    def closed_form_gap(self) -> float:
        return max(
            abs(self.coag_path - self.closed_form_coag),
            abs(self.frag_path - self.closed_form_frag),
        )


def pitman_closed_forms(params: StableDualityParams, config: NestedConfig) -> tuple:
    """p_{b/a, t/a}(x) p_{a,t}(c) and prod p_{a,-b}(c_l) p_{b,t}(n), as probabilities."""
    _single_group(config)
    alpha, beta, theta = params.alpha, params.beta, params.theta
    coag = log_pd_theta_eppf(params.ratio, theta / alpha, config.x_tilde) + log_pd_theta_eppf(
        alpha, theta, config.fine_blocks(0)
    )
    frag = sum(
        log_pd_theta_eppf(alpha, -beta, config.refinements[0][ell]) for ell in range(config.r)
    ) + log_pd_theta_eppf(beta, theta, config.counts[0])
    return math.exp(coag), math.exp(frag)


def recover_pitman_by_quadrature(
    params: StableDualityParams, config: NestedConfig
) -> PitmanRecovery:
    """Integrate both sides of the master equation against the arrival mixing density."""
    _single_group(config)
    n = config.group_totals[0]

    def weight(zeta: float) -> float:
        return log_arrival_mixing_density(params.beta, params.theta, n, zeta)

    def lhs(zeta: float) -> float:
        return master_factors(params, config, zeta).log_lhs + weight(zeta)

    def rhs(zeta: float) -> float:
        return master_factors(params, config, zeta).log_rhs + weight(zeta)

    coag = integrate_half_line(lhs)
    frag = integrate_half_line(rhs)
    closed_coag, closed_frag = pitman_closed_forms(params, config)
    return PitmanRecovery(
        coag_path=coag.value,
        frag_path=frag.value,
        closed_form_coag=closed_coag,
        closed_form_frag=closed_frag,
        abserr=max(coag.abserr, frag.abserr),
    )


def log_power_tilt_eppf(params: StableDualityParams, blocks: tuple) -> float:
    """p_beta(n) Phi_{n,r}, equal to the PD(beta, theta) EPPF."""
    n, r = sum(blocks), len(blocks)
    return log_pd_eppf(params.beta, blocks) + log_phi_weight_pd(params.beta, params.theta, n, r)
