import math

import numpy as np
import pytest
from scipy.special import gammaln

from src.config.constants import GAMMA_RATIO_SERIES_MIN
from src.exceptions import DomainError
from src.gaussian import (
    RngSeed,
    gamma_mean_norm,
    make_rng,
    phi,
    phi_inverse,
    sample_design,
)
from src.gaussian.gamma import _log_half_gamma_ratio


class TestGammaMeanNorm:
    def test_small_values(self):
        assert gamma_mean_norm(1) == pytest.approx(0.7978845608, abs=1e-9)
        assert gamma_mean_norm(2) == pytest.approx(1.2533141373, abs=1e-9)

    def test_below_sqrt_n(self):
        b = gamma_mean_norm(100)
        assert 9.94 < b < 10.0
        assert abs(b - 10.0) / 10.0 < 0.003

    def test_monotone(self):
        values = [gamma_mean_norm(n) for n in range(1, 200)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_large_n_does_not_overflow(self):
        b = gamma_mean_norm(10 ** 6)
        assert b == pytest.approx(math.sqrt(10 ** 6 - 0.5), rel=1e-9)

    @pytest.mark.parametrize("n", [0, -3])
    def test_nonpositive_n(self, n):
        with pytest.raises(DomainError):
            gamma_mean_norm(n)

    def test_non_integer_n(self):
        with pytest.raises(DomainError):
            gamma_mean_norm(2.5)

    @pytest.mark.parametrize("x", [GAMMA_RATIO_SERIES_MIN, 16.5, 20.0, 64.0])
    def test_series_matches_log_gamma(self, x):
        exact = gammaln(x + 0.5) - gammaln(x)
        assert _log_half_gamma_ratio(x) == pytest.approx(exact, abs=1e-12)

    def test_branches_agree_at_switch(self):
        below = _log_half_gamma_ratio(np.nextafter(GAMMA_RATIO_SERIES_MIN, 0.0))
        assert below == pytest.approx(_log_half_gamma_ratio(GAMMA_RATIO_SERIES_MIN), abs=1e-12)

    def test_below_sqrt_n_everywhere(self):
        n = np.arange(1, 1001)
        b = np.array([gamma_mean_norm(int(k)) for k in n])
        assert np.all(b > 0)
        assert np.all(b < np.sqrt(n))

    def test_ratio_inequality_for_all_pairs(self):
        n = np.arange(1, 1001)
        b = np.array([gamma_mean_norm(int(k)) for k in n])
        # ratio[i, j] = b_i / b_j против √(i/j) при i <= j
        ratio = b[:, None] / b[None, :]
        bound = np.sqrt(n[:, None] / n[None, :])
        pairs = n[:, None] <= n[None, :]
        assert np.all(ratio[pairs] <= bound[pairs] * (1 + 1e-12))


class TestPhiInverse:
    def test_inverts_b_n(self):
        assert phi_inverse(gamma_mean_norm(7)) == pytest.approx(7.0, abs=1e-9)

    def test_inverse_of_b_1(self):
        assert phi_inverse(0.7978845608) == pytest.approx(1.0, abs=1e-6)

    def test_real_argument(self):
        t = phi_inverse(12.3)
        assert phi(t) == pytest.approx(12.3, rel=1e-12)

    def test_identity_on_integers(self):
        for n in range(1, 1001):
            assert phi_inverse(gamma_mean_norm(n)) == pytest.approx(n, rel=1e-9)

    def test_monotone(self):
        xs = np.linspace(0.8, 40.0, 60)
        ts = [phi_inverse(float(x)) for x in xs]
        assert all(a < b for a, b in zip(ts, ts[1:]))

    @pytest.mark.parametrize("x", [0.3, 0.79])
    def test_below_b_1_is_one_sample(self, x):
        assert phi_inverse(x) == 1.0

    @pytest.mark.parametrize("x", [0.0, -1.0, math.inf])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            phi_inverse(x)


class TestDesign:
    def test_deterministic(self):
        a = sample_design(2, 3, RngSeed(7))
        b = sample_design(2, 3, RngSeed(7))
        assert np.array_equal(a.entries, b.entries)

    def test_moments(self):
        X = sample_design(2000, 1, 3).entries
        assert abs(X.mean()) < 0.08
        assert 0.9 <= X.var() <= 1.1

    def test_column_moments_at_large_n(self):
        n = 100_000
        X = sample_design(n, 8, 13).entries
        assert np.all(np.abs(X.mean(axis=0)) <= 4 / math.sqrt(n))
        assert np.all(np.abs(X.var(axis=0) - 1.0) <= 4 * math.sqrt(2 / n))

    def test_frobenius(self):
        X = sample_design(500, 500, 5).entries
        assert abs(np.sum(X ** 2) / (500 * 500) - 1.0) < 0.05

    def test_streams_are_independent_of_order(self):
        first = make_rng(9, 3).standard_normal(4)
        make_rng(9, 1).standard_normal(100)
        again = make_rng(9, 3).standard_normal(4)
        assert np.array_equal(first, again)

    def test_child_seed_is_stable(self):
        assert RngSeed(5).child(2) == RngSeed(5).child(2)
        assert RngSeed(5).child(2) != RngSeed(5).child(3)

    @pytest.mark.parametrize("seed", [-1, 2 ** 64])
    def test_seed_range(self, seed):
        with pytest.raises(DomainError):
            RngSeed(seed)

    def test_bad_dimensions(self):
        with pytest.raises(DomainError):
            sample_design(0, 3, 1)
