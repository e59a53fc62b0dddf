import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate, stats
from scipy.special import erfc, gammaln

from src.errors import DomainError, RetryLimitError
from src.levy.bell import log_base_moment, xi_partial
from src.levy.cumulants import log_levy_density, log_psi_cumulant, psi
from src.levy.models import GammaModel, GenGammaModel, StableModel, parse_levy_model
from src.levy.mtp import MtPSampler, get_mtp_sampler, log_mtp_survival, mtp_pmf
from src.levy.sampling import positive_stable, sample_total_mass
from src.numerics.envelope import MtPEnvelope
from src.oracle.montecarlo import chi_square_pooled

ALPHA = 0.001

GG = GenGammaModel(alpha=0.3, theta=1.0, zeta=0.2)


class TestModels:
    def test_families_embed_in_gg_coordinates(self):
        assert StableModel(alpha=0.5).gg() == (0.5, 0.5, 0.0)
        assert GammaModel(theta=2.0, zeta=0.5).gg() == (0.0, 2.0, 0.5)
        assert GG.gg() == (0.3, 1.0, 0.2)

    def test_tilt_adds_to_zeta(self):
        tilted = StableModel(alpha=0.5).tilt(2.0)
        assert tilted.gg() == (0.5, 0.5, 2.0)
        assert not tilted.heavy_tailed
        assert StableModel(alpha=0.5).heavy_tailed

    def test_degenerate_gengamma_rejected(self):
        with pytest.raises(ValidationError):
            GenGammaModel(alpha=0.0, theta=1.0, zeta=0.0)

    def test_unknown_family_rejected(self):
        with pytest.raises(ValidationError):
            parse_levy_model({"family": "cauchy", "alpha": 0.5})

    def test_parse_by_family(self):
        model = parse_levy_model({"family": "gamma", "theta": 1.0, "zeta": 2.0})
        assert isinstance(model, GammaModel)


class TestCumulants:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.8])
    @pytest.mark.parametrize("gamma", [0.3, 1.0, 4.0])
    def test_stable_is_untilted_gengamma(self, alpha, gamma):
        stable = StableModel(alpha=alpha)
        embedded = GenGammaModel(alpha=alpha, theta=alpha, zeta=0.0)
        assert psi(stable, gamma) == pytest.approx(gamma**alpha, rel=1e-12)
        assert psi(embedded, gamma) == pytest.approx(psi(stable, gamma), rel=1e-12)
        for c in range(1, 7):
            # alpha Gamma(c - alpha) / Gamma(1 - alpha) gamma^(alpha - c)
            closed = (
                math.log(alpha)
                + gammaln(c - alpha)
                - gammaln(1 - alpha)
                + (alpha - c) * math.log(gamma)
            )
            assert log_psi_cumulant(stable, c, gamma) == pytest.approx(closed, abs=1e-12)
            assert log_psi_cumulant(embedded, c, gamma) == pytest.approx(closed, abs=1e-12)

    @pytest.mark.parametrize("theta,zeta", [(1.0, 1.0), (2.0, 0.5), (0.3, 4.0)])
    @pytest.mark.parametrize("gamma", [0.3, 1.0, 4.0])
    def test_gamma_is_index_zero_gengamma(self, theta, zeta, gamma):
        gamma_model = GammaModel(theta=theta, zeta=zeta)
        embedded = GenGammaModel(alpha=0.0, theta=theta, zeta=zeta)
        expected = theta * math.log1p(gamma / zeta)
        assert psi(gamma_model, gamma) == pytest.approx(expected, rel=1e-12)
        assert psi(embedded, gamma) == pytest.approx(expected, rel=1e-12)
        for c in range(1, 7):
            # theta (c - 1)! (zeta + gamma)^(-c)
            closed = math.log(theta) + math.lgamma(c) - c * math.log(zeta + gamma)
            assert log_psi_cumulant(gamma_model, c, gamma) == pytest.approx(closed, abs=1e-12)
            assert log_psi_cumulant(embedded, c, gamma) == pytest.approx(closed, abs=1e-12)

    def test_stable_psi(self):
        assert psi(StableModel(alpha=0.5), 4.0) == pytest.approx(2.0, rel=1e-12)

    def test_gamma_psi(self):
        model = GammaModel(theta=2.0, zeta=0.5)
        assert psi(model, 1.5) == pytest.approx(2.0 * math.log(4.0), rel=1e-12)

    def test_gg_psi_matches_levy_integral(self):
        gamma = 1.3

        def integrand(s: float) -> float:
            return -math.expm1(-gamma * s) * math.exp(log_levy_density(GG, s))

        head, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=200)
        tail, _ = integrate.quad(integrand, 1.0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
        assert psi(GG, gamma) == pytest.approx(head + tail, rel=1e-7)

    @pytest.mark.parametrize(
        "model",
        [StableModel(alpha=0.6), GammaModel(theta=2.0, zeta=0.5), GG],
        ids=["stable", "gamma", "gengamma"],
    )
    @pytest.mark.parametrize("gamma", [0.3, 0.9, 2.5])
    def test_cumulants_are_successive_derivatives(self, model, gamma):
        zeta = model.gg().zeta
        h = 1e-5 * (zeta + gamma)
        derivative = (psi(model, gamma + h) - psi(model, gamma - h)) / (2 * h)
        assert math.exp(log_psi_cumulant(model, 1, gamma)) == pytest.approx(derivative, rel=1e-6)
        for c in range(1, 7):
            slope = (
                math.exp(log_psi_cumulant(model, c, gamma + h))
                - math.exp(log_psi_cumulant(model, c, gamma - h))
            ) / (2 * h)
            assert math.exp(log_psi_cumulant(model, c + 1, gamma)) == pytest.approx(
                -slope, rel=1e-6
            )

    @pytest.mark.parametrize("gamma", [0.0, -1.0, math.inf])
    def test_bad_evaluation_point(self, gamma):
        with pytest.raises(DomainError):
            psi(GG, gamma)

    def test_cumulant_order_must_be_positive(self):
        with pytest.raises(DomainError):
            log_psi_cumulant(GG, 0, 1.0)


class TestBell:
    def test_extreme_partial_sums(self):
        gamma, n = 0.8, 6
        table = xi_partial(GG, n, gamma)
        log_first = log_psi_cumulant(GG, 1, gamma)
        assert table.log_xi(n) == pytest.approx(n * log_first, abs=1e-12)
        assert table.log_xi(1) == pytest.approx(log_psi_cumulant(GG, n, gamma), abs=1e-12)

    def test_two_block_partial_sum(self):
        # B_{4,2} = 4 x1 x3 + 3 x2^2
        gamma = 1.1
        x = [math.exp(log_psi_cumulant(GG, c, gamma)) for c in range(1, 4)]
        expected = 4 * x[0] * x[2] + 3 * x[1] ** 2
        table = xi_partial(GG, 4, gamma)
        assert math.exp(table.log_xi(2)) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("n", range(0, 7))
    def test_gamma_family_moments(self, n):
        model = GammaModel(theta=1.5, zeta=0.7)
        lam, gamma = 1.3, 0.8
        shape = lam * 1.5
        expected = (
            gammaln(shape + n)
            - gammaln(shape)
            + shape * math.log(0.7)
            - (shape + n) * math.log(0.7 + gamma)
        )
        table = xi_partial(model, 6, gamma)
        assert table.log_moment(lam, n) == pytest.approx(expected, abs=1e-12)

    def test_zeroth_base_moment_is_laplace_transform(self):
        assert log_base_moment(GG, 0, 0.6) == pytest.approx(-psi(GG, 0.6), rel=1e-12)

    def test_table_bounds(self):
        table = xi_partial(GG, 3, 1.0)
        with pytest.raises(DomainError):
            table.log_xi_total(1.0, 4)
        with pytest.raises(DomainError):
            xi_partial(GG, -1, 1.0)


class TestMtP:
    def test_pmf_sums_to_one(self):
        total = math.fsum(mtp_pmf(GG, 1.0, c) for c in range(1, 3000))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_stable_gives_sibuya(self, stable_model):
        assert mtp_pmf(stable_model, 0.3, 1) == pytest.approx(0.6, rel=1e-12)
        assert mtp_pmf(stable_model, 7.0, 2) == pytest.approx(0.6 * 0.4 / 2, rel=1e-12)

    def test_survival_matches_pmf_complement(self):
        head = math.fsum(mtp_pmf(GG, 1.0, c) for c in range(1, 6))
        assert math.exp(log_mtp_survival(GG, 1.0, 5)) == pytest.approx(1.0 - head, rel=1e-9)

    def test_sibuya_survival(self, stable_model):
        assert math.exp(log_mtp_survival(stable_model, 1.0, 1)) == pytest.approx(0.4, rel=1e-12)
        assert log_mtp_survival(stable_model, 1.0, 0) == 0.0

    def test_sampler_is_cached(self):
        assert get_mtp_sampler(GG, 1.0) is get_mtp_sampler(GG, 1.0)

    def test_scalar_and_vector_draws(self):
        sampler = get_mtp_sampler(GG, 1.0)
        assert isinstance(sampler.sample(np.random.default_rng(1)), int)
        draws = sampler.sample(np.random.default_rng(1), 5)
        assert draws.shape == (5,)
        assert draws.min() >= 1

    @pytest.mark.statistical
    def test_sampler_matches_pmf(self, rng):
        cap = 40
        draws = get_mtp_sampler(GG, 1.0).sample(rng, 50_000)
        observed = np.bincount(np.minimum(draws, cap + 1), minlength=cap + 2)[1:]
        probs = np.array([mtp_pmf(GG, 1.0, c) for c in range(1, cap + 1)])
        assert chi_square_pooled(observed, probs).p_value > ALPHA

    @pytest.mark.statistical
    def test_sibuya_tail_beyond_table(self, rng):
        model = StableModel(alpha=0.5)
        sampler = MtPSampler(model, 1.0, envelope=MtPEnvelope(table_cap=16))
        draws = sampler.sample(rng, 20_000)
        for k in (16, 100):
            expected = math.exp(log_mtp_survival(model, 1.0, k))
            se = math.sqrt(expected * (1 - expected) / draws.size)
            assert abs(np.mean(draws > k) - expected) < 5 * se

    @pytest.mark.statistical
    def test_light_tail_walk_beyond_table(self, rng):
        sampler = MtPSampler(GG, 5.0, envelope=MtPEnvelope(table_cap=16))
        draws = sampler.sample(rng, 20_000)
        expected = math.exp(log_mtp_survival(GG, 5.0, 16))
        se = math.sqrt(expected * (1 - expected) / draws.size)
        assert abs(np.mean(draws > 16) - expected) < 5 * se


class TestTotalMass:
    def test_gamma_draws_are_gamma(self, rng):
        draws = sample_total_mass(GammaModel(theta=2.0, zeta=0.5), 1.5, rng, size=20_000)
        assert np.mean(draws) == pytest.approx(1.5 * 2.0 / 0.5, rel=0.03)

    @pytest.mark.statistical
    def test_positive_stable_laplace_transform(self, rng):
        draws = positive_stable(0.6, rng, 40_000)
        assert np.mean(np.exp(-draws)) == pytest.approx(math.exp(-1.0), abs=0.01)

    @pytest.mark.statistical
    def test_gg_total_mass_laplace_transform(self, rng):
        lam, s = 0.8, 0.7
        draws = sample_total_mass(GG, lam, rng, size=40_000)
        expected = math.exp(-lam * psi(GG, s))
        assert np.mean(np.exp(-s * draws)) == pytest.approx(expected, abs=0.01)

    @pytest.mark.statistical
    def test_untilted_gengamma_matches_stable(self, rng):
        embedded = sample_total_mass(
            GenGammaModel(alpha=0.5, theta=0.5, zeta=0.0), 1.0, rng, size=100_000
        )
        stable = sample_total_mass(
            StableModel(alpha=0.5), 1.0, np.random.default_rng(7), size=100_000
        )
        assert stats.ks_2samp(embedded, stable).pvalue > ALPHA

    @pytest.mark.statistical
    @pytest.mark.parametrize("lam", [1.0, 4.0])
    def test_half_stable_is_levy_law(self, rng, lam):
        # E exp(-s sigma(lam)) = exp(-lam sqrt(s)): Levy law, cdf erfc(lam / (2 sqrt(x)))
        draws = sample_total_mass(StableModel(alpha=0.5), lam, rng, size=40_000)
        result = stats.kstest(draws, lambda x: erfc(lam / (2.0 * np.sqrt(x))))
        assert result.pvalue > ALPHA

    def test_rejection_cap(self, rng):
        model = GenGammaModel(alpha=0.5, theta=1.0, zeta=1.0)
        with pytest.raises(RetryLimitError) as info:
            sample_total_mass(model, 100.0, rng, size=50, max_attempts=1)
        assert info.value.attempts == 1

    def test_time_must_be_positive(self, rng):
        with pytest.raises(DomainError):
            sample_total_mass(GG, 0.0, rng)
