"""Posterior draws of species jumps and group masses given an observed configuration."""
import itertools
import math
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from src.errors import DomainError
from src.levy.bell import xi_partial
from src.levy.cumulants import log_psi_cumulant
from src.levy.models import LevyModel
from src.levy.sampling import sample_total_mass
from src.observability.logger import get_logger
from src.phibp.gibbs import log_frag_num_blocks_pmf
from src.phibp.models import HierModel, NestedConfig
from src.sampler.coupled import sample_h_given_x
from src.sampler.models import PosteriorDraw, SpeciesPosterior

logger = get_logger(__name__)

Given = Literal["counts", "config"]


def _choose(rng: np.random.Generator, log_weights: Sequence[float]) -> int:
    weights = np.asarray(log_weights, dtype=float)
    probs = np.exp(weights - logsumexp(weights))
    return int(rng.choice(probs.size, p=probs / probs.sum()))


def sample_block_sizes(
    model: LevyModel, gamma: float, n: int, x: int, rng: np.random.Generator
) -> Tuple[int, ...]:
    """Sizes of x fine blocks of n individuals, P proportional to prod psi^(c)/c!.

    Parts are drawn left to right against the partial Bell table.
    """
    if not 1 <= x <= n:
        raise DomainError(f"need 1 <= x <= n, got n={n}, x={x}")
    table = xi_partial(model, n, gamma).log_xi_partial

    def log_compositions(m: int, r: int) -> float:
        # sum over compositions of m into r parts of prod psi^(c)/c!
        return float(gammaln(r + 1) - gammaln(m + 1) + table[m, r])

    parts: List[int] = []
    m, r = n, x
    while r > 1:
        first = np.arange(1, m - r + 2)
        log_weights = [
            log_psi_cumulant(model, int(i), gamma)
            - float(gammaln(i + 1))
            + log_compositions(m - int(i), r - 1)
            for i in first
        ]
        i = int(first[_choose(rng, log_weights)])
        parts.append(i)
        m, r = m - i, r - 1
    parts.append(m)
    return tuple(parts)


def sample_group_mass(
    model: LevyModel,
    lam: float,
    gamma: float,
    n: int,
    rng: np.random.Generator,
    blocks: Optional[Sequence[int]] = None,
) -> float:
    """sigma(lam) given n individuals observed at time gamma.

    Each observed block of size c carries a Gamma(c - alpha, zeta + gamma) jump;
    the rest is the total mass of the gamma-tilted subordinator at time lam.
    """
    if n < 0:
        raise DomainError(f"count must be nonnegative, got {n}")
    if blocks is None:
        if n == 0:
            blocks = ()
        else:
            log_weights = [
                log_frag_num_blocks_pmf(model, lam, gamma, n, x) for x in range(1, n + 1)
            ]
            x = 1 + _choose(rng, log_weights)
            blocks = sample_block_sizes(model, gamma, n, x, rng)
    elif sum(blocks) != n:
        raise DomainError(f"blocks {tuple(blocks)} do not sum to {n}")

    alpha, _, zeta = model.gg()
    shapes = np.asarray(blocks, dtype=float) - alpha
    jumps = rng.gamma(shape=shapes, scale=1.0 / (zeta + gamma)) if len(blocks) else np.zeros(0)
    remainder = sample_total_mass(model.tilt(gamma), lam, rng)
    return float(jumps.sum()) + float(remainder)


def _sample_fine_counts(
    hier: HierModel, counts: Sequence[int], rng: np.random.Generator
) -> Tuple[int, ...]:
    """x_j given the species count vector, P proportional to psi0^(sum x) prod Xi_{x_j}."""
    u = hier.psi_total
    ranges = [range(1, n + 1) if n > 0 else range(0, 1) for n in counts]
    tables = [xi_partial(m, n, g) for m, n, g in zip(hier.taus, counts, hier.gammas)]
    options = list(itertools.product(*ranges))
    log_weights = [
        log_psi_cumulant(hier.tau0, sum(xs), u)
        + sum(t.log_xi(x_j) for t, x_j in zip(tables, xs))
        for xs in options
    ]
    return options[_choose(rng, log_weights)]


def sample_posterior_observed(
    hier: HierModel,
    config: NestedConfig,
    rng: np.random.Generator,
    given: Given = "counts",
) -> PosteriorDraw:
    """Species jumps, their group masses and the unobserved remainder.

    With ``given="counts"`` only the species count vectors of ``config`` are
    conditioned on: fine-block counts and refinements are redrawn from their
    conditional laws. With ``given="config"`` the refinements are kept.
    """
    if config.n_groups != hier.n_groups:
        raise DomainError(
            f"configuration has {config.n_groups} groups, model has {hier.n_groups}"
        )

    species = []
    for ell in range(config.r):
        counts = config.species_counts(ell)
        if given == "config":
            refinement = config.species(ell)
            h = sample_h_given_x(hier, config.x_tilde[ell], rng)
            masses = tuple(
                sample_group_mass(model, h, gamma, n, rng, blocks=parts)
                for model, gamma, n, parts in zip(hier.taus, hier.gammas, counts, refinement)
            )
        else:
            xs = _sample_fine_counts(hier, counts, rng)
            h = sample_h_given_x(hier, sum(xs), rng)
            masses = tuple(
                sample_group_mass(
                    model,
                    h,
                    gamma,
                    n,
                    rng,
                    blocks=sample_block_sizes(model, gamma, n, x, rng) if n else (),
                )
                for model, gamma, n, x in zip(hier.taus, hier.gammas, counts, xs)
            )
        species.append(SpeciesPosterior(h=h, group_masses=masses))

    base_remainder = float(sample_total_mass(hier.tau0.tilt(hier.psi_total), 1.0, rng))
    if base_remainder > 0.0:
        unobserved = tuple(
            float(sample_total_mass(model.tilt(gamma), base_remainder, rng))
            for model, gamma in zip(hier.taus, hier.gammas)
        )
    else:
        unobserved = tuple(0.0 for _ in hier.taus)

    logger.debug(
        f"Posterior draw for {config.r} species",
        given=given,
        unobserved_base_mass=base_remainder,
    )
    return PosteriorDraw(
        species=tuple(species),
        unobserved_base_mass=base_remainder,
        unobserved_group_masses=unobserved,
        truncation_level=0.0,
    )


def log_posterior_mean_mass(model: LevyModel, lam: float, gamma: float, n: int) -> float:
    """log E[sigma(lam) | n], a ratio of consecutive tilted moments."""
    table = xi_partial(model, n + 1, gamma)
    return table.log_moment(lam, n + 1) - table.log_moment(lam, n)


def posterior_mean_mass(model: LevyModel, lam: float, gamma: float, n: int) -> float:
    return math.exp(log_posterior_mean_mass(model, lam, gamma, n))
