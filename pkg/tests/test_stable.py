import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from src.errors import DomainError
from src.numerics.quadrature import integrate_half_line
from src.oracle.enumeration import enumerate_nested_configs
from src.oracle.montecarlo import chi_square_pooled
from src.partitions.enumeration import enumerate_compositions
from src.partitions.eppf import log_pd_theta_eppf
from src.phibp.counts import allocation_pmf, joint_count_pmf
from src.stable.bridge import (
    diversity_normalizer,
    sample_block_sizes_given_count,
    stable_bridge_sample,
)
from src.stable.closed_forms import (
    arrival_mixing_density,
    bridge_block_count_pmf,
    scaled_h_density,
    stable_allocation_pmf,
    stable_count_pmf,
)
from src.stable.duality import (
    frag_invariance_check,
    gibbs_duality_residual,
    gibbs_mixing_residual,
    log_power_tilt_eppf,
    master_duality_residual,
    recover_pitman_by_quadrature,
    stable_hierarchy,
    stable_reduction_gap,
)
from src.stable.models import StableDualityParams
from src.stable.phi import TabulatedPhi

ALPHA = 0.001


class TestParams:
    @pytest.mark.parametrize(
        "alpha,beta,theta", [(0.3, 0.6, 0.0), (0.6, 0.6, 0.0), (0.6, 0.3, -0.3), (1.0, 0.5, 0.0)]
    )
    def test_invalid(self, alpha, beta, theta):
        with pytest.raises(ValidationError):
            StableDualityParams(alpha=alpha, beta=beta, theta=theta)

    def test_hierarchy_time(self, stable_params):
        hier = stable_hierarchy(stable_params, 2.0)
        assert hier.gammas[0] == pytest.approx(2.0 ** (1 / 0.3))
        assert hier.species_mass == pytest.approx(2.0, rel=1e-12)


class TestClosedForms:
    @pytest.mark.parametrize("zeta", [0.5, 1.0, 3.0])
    def test_count_law_matches_general_hierarchy(self, stable_params, zeta):
        hier = stable_hierarchy(stable_params, zeta)
        for n in range(0, 7):
            assert stable_count_pmf(0.3, zeta, n) == pytest.approx(
                joint_count_pmf(hier, (n,)), rel=1e-10
            )

    def test_allocation_law_matches_general_hierarchy(self, stable_params):
        hier = stable_hierarchy(stable_params, 1.5)
        for k in range(0, 7):
            assert stable_allocation_pmf(0.6, 0.3, 1.5, k) == pytest.approx(
                allocation_pmf(hier, (k,)), rel=1e-10
            )

    def test_no_individuals(self):
        assert stable_count_pmf(0.3, 2.0, 0) == pytest.approx(math.exp(-2.0))

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_scaled_jump_density_integrates_to_one(self, n):
        result = integrate_half_line(lambda w: math.log(scaled_h_density(0.6, 0.3, n, w)))
        assert result.value == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("theta", [0.0, 0.5])
    def test_arrival_mixing_density_integrates_to_one(self, theta):
        result = integrate_half_line(lambda z: math.log(arrival_mixing_density(0.3, theta, 4, z)))
        assert result.value == pytest.approx(1.0, abs=1e-9)

    def test_bridge_block_counts(self):
        probs = bridge_block_count_pmf(0.6, 5, 2.0)
        assert probs.shape == (5,)
        assert probs.sum() == pytest.approx(1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            stable_count_pmf(0.3, 0.0, 2)
        with pytest.raises(DomainError):
            stable_allocation_pmf(0.3, 0.6, 1.0, 2)


class TestGibbsDuality:
    def test_mixing_collapses_to_power_tilt(self):
        params = StableDualityParams(alpha=0.6, beta=0.3, theta=0.5)
        worst = max(
            gibbs_mixing_residual(params, n, k) for n in range(1, 9) for k in range(1, n + 1)
        )
        assert worst < 1e-10

    @pytest.mark.parametrize("theta", [0.0, 0.5])
    def test_duality_for_every_configuration(self, theta):
        params = StableDualityParams(alpha=0.6, beta=0.3, theta=theta)
        for n in range(1, 6):
            for config, _ in enumerate_nested_configs((n,)):
                assert gibbs_duality_residual(params, config) < 1e-12

    def test_any_positive_weights(self, stable_params):
        phi = TabulatedPhi(table={4: {1: 0.2, 2: 3.0, 3: 0.7, 4: 11.0}})
        for config, _ in enumerate_nested_configs((4,)):
            assert gibbs_duality_residual(stable_params, config, phi) < 1e-12

    def test_tabulated_weights(self):
        with pytest.raises(ValidationError):
            TabulatedPhi(table={2: {1: 0.0}})
        with pytest.raises(DomainError):
            TabulatedPhi(table={2: {1: 1.0}}).log_weight(2, 2)

    def test_power_tilt_is_pitman_yor(self):
        params = StableDualityParams(alpha=0.6, beta=0.3, theta=0.8)
        blocks = (3, 1, 2)
        assert log_power_tilt_eppf(params, blocks) == pytest.approx(
            log_pd_theta_eppf(0.3, 0.8, blocks), abs=1e-12
        )


class TestMasterEquation:
    @pytest.mark.parametrize("zeta", [0.25, 1.0, 4.0])
    def test_master_equation_and_reduction(self, stable_params, zeta):
        for n in range(1, 6):
            for config, _ in enumerate_nested_configs((n,)):
                assert master_duality_residual(stable_params, config, zeta) < 1e-11
                assert stable_reduction_gap(stable_params, config, zeta) < 1e-11

    def test_fragmentation_is_pitman_yor(self):
        for n in range(1, 7):
            for composition in enumerate_compositions(n):
                assert frag_invariance_check(0.6, 0.3, n, composition) < 1e-12

    def test_bad_composition(self):
        with pytest.raises(DomainError):
            frag_invariance_check(0.6, 0.3, 3, (1, 1))

    def test_multi_group_rejected(self, stable_params):
        config, _ = next(enumerate_nested_configs((1, 1)))
        with pytest.raises(DomainError):
            gibbs_duality_residual(stable_params, config)


class TestPitmanRecovery:
    @pytest.mark.parametrize("theta", [0.0, 0.5])
    def test_integrated_master_equation(self, theta):
        params = StableDualityParams(alpha=0.6, beta=0.3, theta=theta)
        for config, _ in enumerate_nested_configs((3,)):
            recovery = recover_pitman_by_quadrature(params, config)
            assert recovery.closed_form_gap < 1e-8
            assert recovery.path_gap < 1e-9


class TestBridge:
    def test_sizes_given_count(self, rng):
        for _ in range(30):
            sizes = sample_block_sizes_given_count(0.6, 7, 3, rng)
            assert len(sizes) == 3 and sum(sizes) == 7

    @pytest.mark.statistical
    def test_size_law_given_count(self, rng):
        alpha = 0.6
        # labeled multiplicity x prod (1 - alpha)_{n_l - 1}
        weights = np.array([4 * (1 - alpha) * (2 - alpha), 3 * (1 - alpha) ** 2])
        probs = weights / weights.sum()
        shapes = [
            tuple(sorted(sample_block_sizes_given_count(alpha, 4, 2, rng))) for _ in range(6000)
        ]
        observed = np.array([shapes.count((1, 3)), shapes.count((2, 2)), 0])
        assert chi_square_pooled(observed, probs).p_value > ALPHA

    def test_bridge_draw(self, rng):
        draw = stable_bridge_sample(0.6, 5, 2.0, rng)
        assert sum(draw.block_sizes) == 5
        assert len(draw.atoms) == draw.num_blocks
        assert draw.normalizer == pytest.approx(draw.total_mass / 2.0 ** (1 / 0.6))
        empty = stable_bridge_sample(0.6, 0, 2.0, rng)
        assert empty.num_blocks == 0 and empty.total_mass == empty.remainder

    @pytest.mark.statistical
    def test_remainder_mean(self, rng):
        draws = diversity_normalizer(0.6, 0, 1.0, rng, 20_000)
        # GG(a, a, 1) at time 1: mean a, variance a (1 - a)
        se = math.sqrt(0.6 * 0.4 / draws.size)
        assert abs(draws.mean() - 0.6) < 5 * se

    def test_two_item_block_count_law(self):
        # P(K = 1) : P(K = 2) = (1 - alpha) scale : alpha scale^2
        alpha, scale = 0.6, 2.0
        probs = bridge_block_count_pmf(alpha, 2, scale)
        expected = (1 - alpha) / ((1 - alpha) + alpha * scale)
        assert probs[0] == pytest.approx(expected, rel=1e-12)
        assert probs.sum() == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.statistical
    def test_bridge_block_count_frequencies(self, rng):
        alpha, n, scale = 0.6, 5, 2.0
        counts = [stable_bridge_sample(alpha, n, scale, rng).num_blocks for _ in range(4000)]
        observed = np.append(np.bincount(counts, minlength=n + 1)[1:], 0)
        probs = bridge_block_count_pmf(alpha, n, scale)
        assert chi_square_pooled(observed, probs).p_value > ALPHA

    @pytest.mark.statistical
    def test_bridge_normalizer_matches_diversity_law(self, rng):
        alpha, n, scale = 0.6, 5, 2.0
        normalized = [stable_bridge_sample(alpha, n, scale, rng).normalizer for _ in range(4000)]
        pooled = diversity_normalizer(alpha, n, scale, np.random.default_rng(11), 20_000)
        assert stats.ks_2samp(normalized, pooled).pvalue > ALPHA

    def test_diversity_normalizer_shape(self, rng):
        assert diversity_normalizer(0.6, 4, 1.5, rng, 50).shape == (50,)

    def test_domain(self, rng):
        with pytest.raises(DomainError):
            stable_bridge_sample(1.2, 3, 1.0, rng)
        with pytest.raises(DomainError):
            sample_block_sizes_given_count(0.6, 3, 4, rng)
