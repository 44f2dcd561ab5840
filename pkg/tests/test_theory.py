import math

import numpy as np
import pytest
from scipy import stats

from mrma.theory import (
    mc_total_variation,
    normal_cdf,
    posterior_drift_eta,
    reversal_success_probability,
    utility_g,
    weight_omega,
)


class TestUtilityG:
    @pytest.mark.parametrize("eta,eta_eps,expected", [
        (1.0, 1.0, 1.0),
        (1.0, 0.0, 0.0),
        (0.8, 0.65, 0.59),
        (0.5, 0.9, 0.5),
    ])
    def test_values(self, eta, eta_eps, expected):
        assert utility_g(eta, eta_eps) == pytest.approx(expected)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            utility_g(1.2, 0.5)

    def test_joint_flip_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            eta, eta_eps = rng.random(2)
            assert utility_g(eta, eta_eps) == pytest.approx(
                utility_g(1 - eta, 1 - eta_eps))

    def test_same_side_deviations_informative(self):
        for eta in np.linspace(0, 1, 21):
            for q in np.linspace(0.5, 1.0, 11):
                drifted = posterior_drift_eta(eta, q)
                assert utility_g(eta, drifted) >= 0.5 - 1e-12


class TestPosteriorDrift:
    @pytest.mark.parametrize("eta,q,expected", [
        (0.8, 0.75, 0.65),
        (0.3, 0.5, 0.5),
        (0.8, 1.0, 0.8),
    ])
    def test_values(self, eta, q, expected):
        assert posterior_drift_eta(eta, q) == pytest.approx(expected)


class TestWeightOmega:
    @pytest.mark.parametrize("z0", [-2.0, 0.0, 2.0])
    @pytest.mark.parametrize("eps_z", [10.0, 1.0, 0.1, 0.01])
    def test_normalization(self, z0, eps_z):
        # E_{z ~ U(-1,1)} omega = (1/2) * integral over [-1,1] = 1
        z = np.linspace(-1.0, 1.0, 20_001)
        omega = weight_omega(z, z0, eps_z)
        assert np.trapezoid(omega, z) / 2.0 == pytest.approx(1.0, abs=1e-4)

    def test_matches_closed_form_normalizer(self):
        # closed form: (1/2) int_{-1}^{1} Laplace(z0 - z) dz
        z0, eps_z = 0.7, 2.0
        lam = 2.0 / eps_z
        upper = 1.0 - 0.5 * math.exp(-(1 + z0) / lam) - 0.5 * math.exp(-(1 - z0) / lam)
        denom = 0.5 * upper
        z = np.array([0.25])
        dens = math.exp(-abs(z0 - z[0]) / lam) / (2 * lam)
        assert weight_omega(z, z0, eps_z)[0] == pytest.approx(dens / denom, rel=1e-6)

    def test_near_uniform_under_heavy_noise(self):
        z = np.linspace(-1.0, 1.0, 2001)
        omega = weight_omega(z, 0.0, 0.01)
        assert omega.max() - omega.min() <= 0.02

    def test_peaked_on_diagonal_under_light_noise(self):
        assert weight_omega(0.0, 0.0, 10.0) > weight_omega(1.0, 0.0, 10.0)

    def test_domain_check(self):
        with pytest.raises(ValueError):
            weight_omega(np.array([1.5]), 0.0, 1.0)


class TestNormalCdf:
    def test_against_reference(self):
        for x in np.linspace(-8, 8, 1601):
            assert normal_cdf(float(x)) == pytest.approx(stats.norm.cdf(x), abs=1e-7)


class TestReversalSuccessProbability:
    def test_half_is_coin_flip(self):
        assert reversal_success_probability(0.5, 10) == pytest.approx(0.5)

    def test_known_value(self):
        # sqrt(100) * 0.1 / sqrt(0.24) = 2.0412, Phi = 0.9794
        assert reversal_success_probability(0.6, 100) == pytest.approx(0.9794, abs=1e-4)

    def test_limit_in_n(self):
        assert reversal_success_probability(0.6, 10_000_000) == pytest.approx(1.0, abs=1e-9)

    def test_degenerate_r_rejected(self):
        for r in (0.0, 1.0):
            with pytest.raises(ValueError):
                reversal_success_probability(r, 10)

    def test_matches_exact_binomial_selection(self):
        # oracle: selection is correct iff at least half the evaluation bits
        # are right; exact binomial tail, ties keep the original classifier
        for r in (0.55, 0.6, 0.7):
            for n1 in (25, 50, 100):
                thresh = math.ceil(n1 / 2.0)
                exact = 1.0 - stats.binom.cdf(thresh - 1, n1, r)
                assert reversal_success_probability(r, n1) == pytest.approx(
                    exact, abs=0.05)


class TestMcTotalVariation:
    def test_zero_noise_limit(self):
        rng = np.random.default_rng(0)
        est = mc_total_variation(2, math.inf, 50_000, 16, rng)
        assert est <= 0.05

    def test_monotone_in_epsilon(self):
        rng = np.random.default_rng(1)
        low = mc_total_variation(2, 0.1, 100_000, 32, rng)
        high = mc_total_variation(2, 10.0, 100_000, 32, rng)
        assert low > high

    def test_monotone_in_dimension(self):
        rng = np.random.default_rng(2)
        small = mc_total_variation(1, 1.0, 100_000, 32, rng)
        large = mc_total_variation(10, 1.0, 100_000, 32, rng)
        assert large > small

    def test_matches_analytic_marginal_tv(self):
        # closed form overlap of U(-1,1) with its Laplace convolution
        def analytic(lam):
            z = np.linspace(-1, 1, 100_001)
            g = 0.5 * (1 - 0.5 * np.exp(-(1 + z) / lam) - 0.5 * np.exp(-(1 - z) / lam))
            return 1.0 - np.trapezoid(np.minimum(0.5, g), z)

        rng = np.random.default_rng(3)
        d, eps_z = 1, 2.0  # lambda = 1, inside the window cap
        lam = 2.0 * d / eps_z
        est = mc_total_variation(d, eps_z, 200_000, 256, rng)
        assert est == pytest.approx(analytic(lam), abs=0.02)

    def test_parameter_validation(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ValueError):
            mc_total_variation(2, 1.0, 100, 16, rng)
        with pytest.raises(ValueError):
            mc_total_variation(2, 1.0, 100_000, 2, rng)
        with pytest.raises(ValueError):
            mc_total_variation(0, 1.0, 100_000, 16, rng)
