import math

import numpy as np
import pytest
from scipy import stats

from src.errors import DomainError, EnvelopeError, SamplerCapError
from src.levy.cumulants import log_psi_cumulant
from src.levy.models import GammaModel
from src.levy.mtp import get_mtp_sampler
from src.numerics.quadrature import integrate_interval
from src.oracle.enumeration import enumerate_nested_configs
from src.oracle.montecarlo import chi_square_pooled
from src.phibp.counts import count_grid
from src.phibp.densities import h_marginal_density
from src.phibp.laws import duality_sides
from src.phibp.models import HierModel, NestedConfig
from src.sampler.conditional import conditional_law, sample_conditional_given_totals
from src.sampler.coupled import sample_count_summary, sample_coupled, sample_h_given_x
from src.sampler.models import StepFunction
from src.sampler.paths import materialize_paths
from src.sampler.posterior import (
    posterior_mean_mass,
    sample_block_sizes,
    sample_group_mass,
    sample_posterior_observed,
)
from src.sampler.streams import RandomStreams

ALPHA = 0.001


class TestStreams:
    def test_streams_do_not_depend_on_consumption_order(self):
        a = RandomStreams(7, draw_index=3)
        first = a.species(0).random(4)
        second = a.species(1).random(4)
        b = RandomStreams(7, draw_index=3)
        assert np.array_equal(b.species(1).random(4), second)
        assert np.array_equal(b.species(0).random(4), first)

    def test_keys_give_distinct_streams(self):
        streams = RandomStreams(7)
        assert streams.species(0).random() != streams.species(1).random()
        assert streams.subblock(0, 0, 0).random() != streams.subblock(0, 1, 0).random()
        assert streams.root().random() != streams.for_draw(1).root().random()

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_seed_range(self, seed):
        with pytest.raises(DomainError):
            RandomStreams(seed)

    def test_full_64_bit_seed(self):
        assert 0.0 <= RandomStreams(2**64 - 1).root().random() < 1.0


class TestCoupled:
    def test_draws_are_reproducible(self, gg_hier):
        first = sample_coupled(gg_hier, RandomStreams(11).for_draw(5))
        second = sample_coupled(gg_hier, RandomStreams(11).for_draw(5))
        assert first.model_dump_json() == second.model_dump_json()

    def test_draw_summaries_agree(self, gg_hier):
        streams = RandomStreams(3)
        for i in range(20):
            draw = sample_coupled(gg_hier, streams.for_draw(i))
            assert sum(draw.fine_counts) == draw.k_tilde
            for s in draw.species:
                assert s.x_tilde >= 1
                assert all(c >= x for c, x in zip(s.counts, s.x))

    def test_subblock_cap(self, gg_hier):
        streams = RandomStreams(5)
        with pytest.raises(SamplerCapError):
            for i in range(200):
                sample_coupled(gg_hier, streams.for_draw(i), max_subblocks=1)

    def test_base_jump_needs_a_block(self, gg_hier, rng):
        with pytest.raises(DomainError):
            sample_h_given_x(gg_hier, 0, rng)

    @pytest.mark.statistical
    def test_base_jump_given_blocks(self, gg_hier, rng):
        # tau0 is GG(0.4, 1, 0.5): H | x ~ Gamma(x - 0.4, 0.5 + u)
        rate = 0.5 + gg_hier.psi_total
        draws = [sample_h_given_x(gg_hier, 3, rng) for _ in range(5000)]
        result = stats.kstest(draws, stats.gamma(a=2.6, scale=1.0 / rate).cdf)
        assert result.pvalue > ALPHA

    @pytest.mark.statistical
    def test_base_jump_mixed_over_blocks(self, gg_hier, rng):
        x_sampler = get_mtp_sampler(gg_hier.tau0, gg_hier.psi_total)
        draws = np.array(
            [sample_h_given_x(gg_hier, int(x_sampler.sample(rng)), rng) for _ in range(20_000)]
        )
        edges = [0.25, 0.5, 1.0, 2.0, 4.0, math.inf]
        upper = [
            integrate_interval(lambda lam: h_marginal_density(gg_hier, lam), a, b).value
            for a, b in zip(edges[:-1], edges[1:])
        ]
        probs = np.array([1.0 - math.fsum(upper)] + upper)
        observed = np.append(np.histogram(draws, bins=[0.0] + edges)[0], 0)
        assert chi_square_pooled(observed, probs).p_value > ALPHA

    @pytest.mark.statistical
    def test_species_count_mean(self, gg_hier):
        streams = RandomStreams(20240601)
        phi = np.array([sample_coupled(gg_hier, streams.for_draw(i)).phi for i in range(2000)])
        mass = gg_hier.species_mass
        assert abs(phi.mean() - mass) < 5 * math.sqrt(mass / phi.size)


class TestPaths:
    def test_paths_end_at_draw_totals(self, gg_hier):
        draw = sample_coupled(gg_hier, RandomStreams(9).for_draw(0))
        paths = materialize_paths(draw)
        for j in range(gg_hier.n_groups):
            assert paths.individuals[j](1.0) == draw.group_totals[j]
            assert paths.counts[j](1.0) == draw.group_totals[j]
            assert paths.allocation[j](1.0) == draw.fine_counts[j]
            assert sum(f.total for f in paths.fragments[j]) == draw.group_totals[j]

    def test_step_function(self):
        step = StepFunction.from_jumps([(0.7, 2), (0.2, 1)])
        assert step(0.1) == 0
        assert step(0.2) == 1
        assert step(0.9) == 3
        assert step.locations == (0.2, 0.7)


class TestCountSummary:
    def test_uncensored_totals_add_up(self, gg_hier):
        summary = sample_count_summary(gg_hier, 500, count_cap=10_000, seed=1)
        assert summary.species_draw.size == summary.phi.sum()
        per_draw = np.zeros_like(summary.group_totals)
        np.add.at(per_draw, summary.species_draw, summary.species_counts)
        assert np.array_equal(per_draw, summary.group_totals)
        assert np.array_equal(summary.x.sum(axis=1), summary.x_tilde)

    def test_heavy_tails_are_censored(self, stable_hier):
        summary = sample_count_summary(stable_hier, 2000, count_cap=5, seed=2)
        assert summary.group_totals.max() <= summary.censored
        assert summary.species_counts.max() <= summary.censored

    def test_reproducible(self, gg_hier):
        a = sample_count_summary(gg_hier, 100, 30, seed=4)
        b = sample_count_summary(gg_hier, 100, 30, seed=4)
        assert np.array_equal(a.group_totals, b.group_totals)

    @pytest.mark.statistical
    def test_species_count_law(self, gg_hier):
        summary = sample_count_summary(gg_hier, 50_000, 30, seed=20240601)
        cap = 25
        observed = np.bincount(np.minimum(summary.phi, cap + 1), minlength=cap + 2)
        probs = stats.poisson.pmf(np.arange(cap + 1), gg_hier.species_mass)
        assert chi_square_pooled(observed, probs).p_value > ALPHA

    @pytest.mark.statistical
    def test_group_totals_covariance(self):
        hier = HierModel(
            tau0=GammaModel(theta=1.0, zeta=1.0),
            taus=(GammaModel(theta=1.0, zeta=2.0), GammaModel(theta=1.5, zeta=3.0)),
            gammas=(0.5, 0.8),
        )
        cap = 30
        grid = count_grid(hier, cap)
        assert grid.sum() == pytest.approx(1.0, abs=1e-9)
        values = np.arange(cap + 1)
        mean_a = float(values @ grid.sum(axis=1))
        mean_b = float(values @ grid.sum(axis=0))
        exact = float(values @ grid @ values) - mean_a * mean_b
        assert exact > 0.0

        totals = sample_count_summary(hier, 100_000, cap, seed=20240601).group_totals
        assert totals.max() <= cap
        centered = (totals[:, 0] - mean_a) * (totals[:, 1] - mean_b)
        se = centered.std(ddof=1) / math.sqrt(centered.size)
        assert abs(centered.mean() - exact) < 5 * se

    def test_bad_arguments(self, gg_hier):
        with pytest.raises(DomainError):
            sample_count_summary(gg_hier, 0, 30, seed=1)
        with pytest.raises(DomainError):
            sample_count_summary(gg_hier, 10, 0, seed=1)


class TestConditional:
    def test_law_matches_coagulation_side(self, gg_hier):
        configs, probs = conditional_law(gg_hier, (2, 1))
        by_config = {c: p for c, p in zip(configs, probs)}
        for config, mult in enumerate_nested_configs((2, 1)):
            lhs = mult * math.exp(duality_sides(config, gg_hier).log_lhs)
            assert by_config[config] == pytest.approx(lhs, rel=1e-9)

    @pytest.mark.statistical
    def test_sampled_frequencies(self, gg_hier, rng):
        configs, probs = conditional_law(gg_hier, (2, 1))
        index = {c: i for i, c in enumerate(configs)}
        draws = [index[sample_conditional_given_totals(gg_hier, (2, 1), rng)] for _ in range(5000)]
        observed = np.append(np.bincount(draws, minlength=len(configs)), 0)
        assert chi_square_pooled(observed, probs).p_value > ALPHA

    def test_envelope(self, gg_hier, gg_single, rng):
        with pytest.raises(EnvelopeError):
            sample_conditional_given_totals(gg_single, (9,), rng)
        with pytest.raises(DomainError):
            sample_conditional_given_totals(gg_hier, (0, 1), rng)


class TestPosterior:
    MODEL = GammaModel(theta=2.0, zeta=0.5)

    def test_block_sizes_partition_the_count(self, rng):
        for _ in range(50):
            parts = sample_block_sizes(self.MODEL, 0.7, 6, 3, rng)
            assert len(parts) == 3 and sum(parts) == 6 and min(parts) >= 1

    @pytest.mark.statistical
    def test_block_size_law(self, rng):
        n, x, gamma = 4, 2, 0.7
        options = [(1, 3), (2, 2), (3, 1)]
        weights = np.array(
            [
                math.exp(
                    sum(log_psi_cumulant(self.MODEL, c, gamma) - math.lgamma(c + 1) for c in o)
                )
                for o in options
            ]
        )
        probs = weights / weights.sum()
        draws = [
            options.index(sample_block_sizes(self.MODEL, gamma, n, x, rng)) for _ in range(6000)
        ]
        observed = np.append(np.bincount(draws, minlength=3), 0)
        assert chi_square_pooled(observed, probs).p_value > ALPHA

    def test_gamma_posterior_mean_is_closed_form(self):
        # sigma(lam) | n ~ Gamma(lam theta + n, zeta + gamma)
        assert posterior_mean_mass(self.MODEL, 1.3, 0.7, 3) == pytest.approx(5.6 / 1.2, rel=1e-10)

    @pytest.mark.statistical
    def test_group_mass_draws(self, rng):
        draws = np.array([sample_group_mass(self.MODEL, 1.3, 0.7, 3, rng) for _ in range(10_000)])
        se = math.sqrt(5.6) / 1.2 / math.sqrt(draws.size)
        assert abs(draws.mean() - 5.6 / 1.2) < 5 * se

    def test_given_blocks_must_sum(self, rng):
        with pytest.raises(DomainError):
            sample_group_mass(self.MODEL, 1.0, 0.7, 3, rng, blocks=(1, 1))

    @pytest.mark.parametrize("given", ["counts", "config"])
    def test_posterior_draw(self, gg_hier, rng, given):
        config = NestedConfig.from_species([[[2], [1]], [[1], []]])
        draw = sample_posterior_observed(gg_hier, config, rng, given=given)
        assert len(draw.species) == config.r
        assert all(s.h > 0 for s in draw.species)
        assert all(len(s.group_masses) == gg_hier.n_groups for s in draw.species)
        assert all(m > 0 for s in draw.species for m in s.group_masses)
        assert len(draw.unobserved_group_masses) == gg_hier.n_groups
        assert draw.truncation_level == 0.0

    @pytest.mark.statistical
    def test_posterior_means_given_config(self, gg_hier, rng):
        config = NestedConfig.from_species([[[2], [1]], [[1], []]])
        draws = [
            sample_posterior_observed(gg_hier, config, rng, given="config") for _ in range(8000)
        ]
        u = gg_hier.psi_total
        tau1, tau2 = gg_hier.taus
        # E[H | x~] = (x~ - 0.4) / (0.5 + u); a block of size c adds Gamma(c - alpha, zeta + gamma)
        observed_block = (2 - 0.3) / (0.2 + 1.0)
        expected = {
            (0, 0): observed_block + 1.6 / (0.5 + u) * math.exp(log_psi_cumulant(tau1, 1, 1.0)),
            (1, 1): 0.6 / (0.5 + u) * math.exp(log_psi_cumulant(tau2, 1, 1.5)),
        }
        for (ell, j), mean in expected.items():
            masses = np.array([d.species[ell].group_masses[j] for d in draws])
            se = masses.std(ddof=1) / math.sqrt(masses.size)
            assert abs(masses.mean() - mean) < 5 * se, (ell, j)

    def test_posterior_group_mismatch(self, gg_single, rng):
        config = NestedConfig.from_species([[[1], [1]]])
        with pytest.raises(DomainError):
            sample_posterior_observed(gg_single, config, rng)
