"""Sampler for the coupled species / fine-block construction.

phi ~ Poisson(Psi_0(sum psi_j)); per species X~ ~ MtP(tau0, sum psi_j),
H | X~ = x from the density proportional to lambda^x e^{-lambda u} tau0(lambda),
the split over groups is Multinomial(X~, q) and every fine block holds
C ~ MtP(tau_j, gamma_j) individuals.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.errors import DomainError, SamplerCapError
from src.levy.mtp import get_mtp_sampler
from src.numerics.envelope import get_numeric_envelope
from src.observability.logger import get_logger
from src.phibp.models import HierModel
from src.sampler.models import CoupledDraw, SpeciesRecord, SubBlock
from src.sampler.streams import RandomStreams

logger = get_logger(__name__)

SUMMARY_STREAM = 0


def sample_h_given_x(hier: HierModel, x: int, rng: np.random.Generator) -> float:
    """Base jump of a species carrying x fine blocks: Gamma(x - alpha0, zeta0 + u)."""
    if x < 1:
        raise DomainError(f"fine-block count must be >= 1, got {x}")
    alpha0, _, zeta0 = hier.tau0.gg()
    return float(rng.gamma(shape=x - alpha0, scale=1.0 / (zeta0 + hier.psi_total)))


def sample_coupled(
    hier: HierModel, streams: RandomStreams, max_subblocks: Optional[int] = None
) -> CoupledDraw:
    cap = max_subblocks or get_numeric_envelope().sampler.max_subblocks
    u = hier.psi_total
    phi = int(streams.root().poisson(hier.species_mass))
    x_sampler = get_mtp_sampler(hier.tau0, u)
    c_samplers = [get_mtp_sampler(m, g) for m, g in zip(hier.taus, hier.gammas)]
    q = np.asarray(hier.q)

    species: List[SpeciesRecord] = []
    materialized = 0
    for ell in range(phi):
        rng = streams.species(ell)
        x_tilde = int(x_sampler.sample(rng))
        materialized += x_tilde
        if materialized > cap:
            raise SamplerCapError(
                f"draw {streams.draw_index} needs more than {cap} sub-blocks; "
                f"use the count summary sampler for heavy-tailed models"
            )
        h = sample_h_given_x(hier, x_tilde, rng)
        split = rng.multinomial(x_tilde, q)
        tag = float(rng.random())

        subblocks = []
        for j, x_j in enumerate(split):
            blocks = []
            for k in range(int(x_j)):
                sub_rng = streams.subblock(ell, j, k)
                count = int(c_samplers[j].sample(sub_rng))
                blocks.append(SubBlock(count=count, tag=float(sub_rng.random())))
            subblocks.append(tuple(blocks))

        species.append(
            SpeciesRecord(
                tag=tag,
                h=h,
                x=tuple(int(v) for v in split),
                subblocks=tuple(subblocks),
            )
        )

    return CoupledDraw(n_groups=hier.n_groups, species=tuple(species))


@dataclass
class CountSummary:
    """Integer summaries of M coupled draws.

    Species-level arrays are indexed by species in draw order; ``species_draw``
    maps each species to its draw. Count arrays are right-censored: any value
    above ``count_cap`` is stored as ``count_cap + 1``.
    """

    draws: int
    count_cap: int
    phi: np.ndarray
    species_draw: np.ndarray
    x_tilde: np.ndarray
    x: np.ndarray
    first_blocks: List[np.ndarray]
    species_counts: np.ndarray
    group_totals: np.ndarray
    fine_counts: np.ndarray

    @property
    def censored(self) -> int:
        return self.count_cap + 1

    @property
    def total_counts(self) -> np.ndarray:
        """Sum over groups of the totals, censored at count_cap."""
        return np.minimum(self.group_totals.sum(axis=1), self.censored)


def sample_count_summary(
    hier: HierModel, draws: int, count_cap: int, seed: int
) -> CountSummary:
    """Vectorised version of ``sample_coupled`` that keeps only counts.

    Every C >= 1, so a species' group count is decided as soon as the first
    count_cap + 1 of its fine blocks are drawn; at most that many are drawn
    per (group, species).
    """
    if draws < 1:
        raise DomainError(f"need at least one draw, got {draws}")
    if count_cap < 1:
        raise DomainError(f"count cap must be >= 1, got {count_cap}")
    rng = RandomStreams(seed).named(SUMMARY_STREAM)
    censored = count_cap + 1

    phi = rng.poisson(hier.species_mass, size=draws).astype(np.int64)
    species_draw = np.repeat(np.arange(draws), phi)
    n_species = int(phi.sum())

    x_sampler = get_mtp_sampler(hier.tau0, hier.psi_total)
    x_tilde = np.asarray(x_sampler.sample(rng, n_species), dtype=np.int64)
    if hier.n_groups == 1:
        x = x_tilde[:, None].copy()
    elif n_species == 0:
        x = np.zeros((0, hier.n_groups), dtype=np.int64)
    else:
        x = rng.multinomial(x_tilde, np.asarray(hier.q)).astype(np.int64)

    first_blocks: List[np.ndarray] = []
    species_counts = np.zeros((n_species, hier.n_groups), dtype=np.int64)
    group_totals = np.zeros((draws, hier.n_groups), dtype=np.int64)
    fine_counts = np.zeros((draws, hier.n_groups), dtype=np.int64)

    for j, (model, gamma) in enumerate(zip(hier.taus, hier.gammas)):
        kept = np.minimum(x[:, j], censored)
        sampler = get_mtp_sampler(model, gamma)
        c = np.asarray(sampler.sample(rng, int(kept.sum())), dtype=np.int64)
        ends = np.cumsum(kept)
        starts = ends - kept
        first_blocks.append(c[starts[kept > 0]])

        partial = np.concatenate(([0], np.cumsum(np.minimum(c, censored))))
        species_counts[:, j] = np.minimum(partial[ends] - partial[starts], censored)

        totals = np.bincount(species_draw, weights=species_counts[:, j], minlength=draws)
        group_totals[:, j] = np.minimum(totals.astype(np.int64), censored)
        blocks = np.bincount(species_draw, weights=kept, minlength=draws)
        fine_counts[:, j] = np.minimum(blocks.astype(np.int64), censored)

    logger.debug(
        f"Count summary: {draws} draws, {n_species} species", stage="sample_count_summary"
    )
    return CountSummary(
        draws=draws,
        count_cap=count_cap,
        phi=phi,
        species_draw=species_draw,
        x_tilde=x_tilde,
        x=x,
        first_blocks=first_blocks,
        species_counts=species_counts,
        group_totals=group_totals,
        fine_counts=fine_counts,
    )
