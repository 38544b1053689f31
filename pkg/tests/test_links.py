import math

import numpy as np
import pytest

from src.exceptions import (
    ConfigError,
    DomainError,
    LinkEvaluationError,
    PreconditionError,
    UnsupportedError,
)
from src.gaussian import gaussian_design, make_rng
from src.links import (
    Link,
    apply_link,
    concentration_probe,
    effective_noise,
    link_stats,
    link_stats_analytic,
    link_stats_mc,
)
from src.solvers import sparse_unit_vector

SIGN_VARIANCE = 1.0 - 2.0 / math.pi


class TestApplyLink:
    def test_sign_tie_is_positive(self):
        assert apply_link(Link.sign(), np.array([-0.5, 2.0, 0.0])).tolist() == [-1.0, 1.0, 1.0]

    def test_linear_is_identity(self):
        z = np.array([0.1, -3.0, 7.5])
        assert np.array_equal(apply_link(Link.linear(), z), z)

    def test_quantize_midpoint(self):
        assert apply_link(Link.quantize(2, 1.0), np.array([0.3])).tolist() == [0.5]

    def test_quantize_saturates(self):
        out = apply_link(Link.quantize(4, 1.0), np.array([-10.0, 10.0]))
        assert out.tolist() == [-0.75, 0.75]

    def test_custom_non_finite_names_index(self):
        link = Link.custom(lambda z: np.where(z > 1.0, np.nan, z), name="broken")
        with pytest.raises(LinkEvaluationError) as e:
            apply_link(link, np.array([0.0, 0.5, 2.0]))
        assert e.value.index == 2

    def test_callable(self):
        assert Link.cubic()(np.array([2.0])).tolist() == [8.0]


class TestLinkConfig:
    def test_round_trip(self):
        link = Link.quantize(16, 3.0)
        assert Link.from_dict(link.to_dict()) == link

    def test_missing_parameter(self):
        with pytest.raises(ConfigError) as e:
            Link.from_dict({"kind": "quantize", "levels": 4})
        assert e.value.field == "link.clip"

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            Link.from_dict({"kind": "relu"})

    def test_custom_requires_registry(self):
        with pytest.raises(ConfigError):
            Link.from_dict({"kind": "custom", "name": "mine"})
        link = Link.from_dict({"kind": "custom", "name": "mine"}, registry={"mine": np.tanh})
        assert link.name == "mine"


class TestAnalyticStats:
    def test_linear(self):
        stats = link_stats_analytic(Link.linear())
        assert (stats.mu, stats.sigma_sq, stats.gamma_sq) == (1.0, 0.0, 0.0)

    def test_sign(self):
        stats = link_stats_analytic(Link.sign())
        assert stats.mu == pytest.approx(0.79788456, abs=1e-8)
        assert stats.sigma_sq == pytest.approx(0.36338023, abs=1e-8)
        assert stats.gamma_sq == pytest.approx(0.36338023, abs=1e-8)

    def test_cubic(self):
        stats = link_stats_analytic(Link.cubic())
        assert (stats.mu, stats.sigma_sq, stats.gamma_sq) == (3.0, 6.0, 42.0)

    def test_unregistered(self):
        with pytest.raises(UnsupportedError):
            link_stats_analytic(Link.tanh_scale(2.0))

    def test_fine_quantizer_approaches_linear(self):
        stats = link_stats_analytic(Link.quantize(4096, 8.0))
        assert stats.mu == pytest.approx(1.0, abs=1e-3)
        assert stats.sigma_sq < 1e-5

    def test_quantizer_agrees_with_monte_carlo(self):
        link = Link.quantize(16, 3.0)
        exact = link_stats_analytic(link)
        mc = link_stats_mc(link, 200_000, 4)
        assert mc.mu == pytest.approx(exact.mu, abs=0.01)
        assert mc.sigma_sq == pytest.approx(exact.sigma_sq, abs=0.005)
        assert mc.gamma_sq == pytest.approx(exact.gamma_sq, abs=0.01)


class TestMonteCarloStats:
    def test_sign_mu(self):
        stats = link_stats_mc(Link.sign(), 10 ** 6, 2016)
        assert stats.mu == pytest.approx(0.798, abs=0.01)
        assert stats.source == "monte-carlo"
        assert stats.mu_se > 0

    def test_linear_has_no_noise(self):
        stats = link_stats_mc(Link.linear(), 10 ** 4, 1)
        assert stats.sigma_sq < 1e-25

    def test_sign_gamma_matches_analytic(self):
        stats = link_stats_mc(Link.sign(), 400_000, 3)
        assert stats.sigma_sq == pytest.approx(SIGN_VARIANCE, abs=0.01)
        assert stats.gamma_sq == pytest.approx(SIGN_VARIANCE, abs=0.01)

    @pytest.mark.slow
    def test_cubic_gamma(self):
        stats = link_stats_mc(Link.cubic(), 10 ** 7, 5)
        assert stats.gamma_sq == pytest.approx(42.0, abs=3.0)

    def test_deterministic(self):
        a = link_stats_mc(Link.tanh_scale(2.0), 5000, 8)
        b = link_stats_mc(Link.tanh_scale(2.0), 5000, 8)
        assert a == b

    def test_too_few_samples(self):
        with pytest.raises(PreconditionError):
            link_stats_mc(Link.sign(), 999, 1)

    def test_non_finite_output(self):
        link = Link.custom(lambda z: 1.0 / (z - z), name="nan")
        with pytest.raises(LinkEvaluationError):
            link_stats_mc(link, 1000, 1)

    def test_dispatch(self):
        assert link_stats(Link.sign()).source == "analytic"
        assert link_stats(Link.tanh_scale(1.0), samples=2000, seed=1).source == "monte-carlo"

    @pytest.mark.slow
    @pytest.mark.parametrize("link", [Link.sign(), Link.cubic()], ids=["sign", "cubic"])
    def test_agrees_with_analytic_within_standard_errors(self, link):
        exact = link_stats_analytic(link)
        mc = link_stats_mc(link, 10 ** 6, 17)
        assert abs(mc.mu - exact.mu) <= 5 * mc.mu_se
        assert abs(mc.sigma_sq - exact.sigma_sq) <= 5 * mc.sigma_sq_se
        assert abs(mc.gamma_sq - exact.gamma_sq) <= 5 * mc.gamma_sq_se

    @pytest.mark.parametrize("link", [Link.sign(), Link.cubic(), Link.tanh_scale(2.0), Link.quantize(8, 2.0)],
                             ids=["sign", "cubic", "tanh", "quantize"])
    def test_sigma_is_minimal_residual_over_slopes(self, link):
        stats = link_stats_mc(link, 20_000, 18)
        # выборка из одной порции совпадает с первыми 20000 значениями make_rng(18)
        g = make_rng(18).standard_normal(20_000)
        f = apply_link(link, g)
        for c in np.linspace(stats.mu - 2.0, stats.mu + 2.0, 41):
            assert np.mean((f - c * g) ** 2) >= stats.sigma_sq * (1 - 1e-12) - 1e-15


class TestEffectiveNoise:
    def test_linear_is_zero(self):
        X = gaussian_design(50, 10, make_rng(1))
        theta = sparse_unit_vector(10, 3, make_rng(2))
        noise = effective_noise(Link.linear(), X, theta, 1.0)
        assert noise.norm == 0.0
        assert not np.any(noise.w)

    def test_sign_norm_concentrates(self):
        X = gaussian_design(10_000, 5, make_rng(3))
        theta = sparse_unit_vector(5, 2, make_rng(4))
        stats = link_stats(Link.sign())
        noise = effective_noise(Link.sign(), X, theta, stats.mu)
        ratio = noise.norm ** 2 / 10_000
        assert SIGN_VARIANCE * 0.95 < ratio < SIGN_VARIANCE * 1.05

    def test_perturbed_mu(self):
        X = gaussian_design(200, 8, make_rng(5))
        theta = sparse_unit_vector(8, 2, make_rng(6))
        base = effective_noise(Link.sign(), X, theta, 0.8)
        moved = effective_noise(Link.sign(), X, theta, 0.85)
        assert abs(moved.norm - base.norm) <= 0.05 * np.linalg.norm(X @ theta) + 1e-12

    def test_requires_unit_theta(self):
        X = gaussian_design(20, 3, make_rng(7))
        with pytest.raises(PreconditionError):
            effective_noise(Link.sign(), X, np.array([1.0, 1.0, 0.0]), 0.8)


class TestConcentrationProbe:
    def test_linear_is_zero(self):
        estimate = concentration_probe(Link.linear(), 100, 1.0, 50, 1)
        assert estimate.p_hat == 0.0
        assert estimate.note

    def test_markov_bound(self):
        estimate = concentration_probe(Link.sign(), 1000, 2.0, 10_000, 9)
        assert estimate.p_hat <= 0.5

    def test_monotone_in_eta(self):
        low = concentration_probe(Link.sign(), 1000, 1.5, 2000, 10)
        high = concentration_probe(Link.sign(), 1000, 3.0, 2000, 10)
        assert low.p_hat >= high.p_hat

    def test_nonincreasing_on_eta_grid(self):
        estimates = [concentration_probe(Link.sign(), 500, eta, 2000, 19).p_hat
                     for eta in (0.5, 1.0, 1.5, 2.0, 3.0)]
        assert estimates == sorted(estimates, reverse=True)

    def test_domain(self):
        with pytest.raises(DomainError):
            concentration_probe(Link.sign(), 0, 1.0, 10, 1)
