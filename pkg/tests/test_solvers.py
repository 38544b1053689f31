import math

import numpy as np
import pytest
from scipy.stats import chisquare

from src.bounds import check_rate_condition, kappa
from src.exceptions import (
    ConfigError,
    DivergenceError,
    DomainError,
    PreconditionError,
    ResourceError,
)
from src.gaussian import gamma_mean_norm, gaussian_design, make_rng
from src.geometry import Regularizer, minimal_samples
from src.links import Link, LinkStats, link_stats
from src.solvers import (
    Problem,
    ProxSchedule,
    ResamplingSource,
    SolverConfig,
    lambda_schedule_step,
    pgd_solve,
    proxgd_resampled_solve,
    proxgd_solve,
    psgd_solve,
    resolve_regularizer,
    row_weights,
    sample_rows,
    sparse_unit_vector,
    synthetic_problem,
)


class TestProblem:
    def test_synthetic_is_deterministic(self):
        a = synthetic_problem(30, 20, 3, Link.sign(), seed=4)
        b = synthetic_problem(30, 20, 3, Link.sign(), seed=4)
        assert np.array_equal(a.X, b.X)
        assert np.array_equal(a.y, b.y)
        assert np.count_nonzero(a.theta_star) == 3
        assert np.linalg.norm(a.theta_star) == pytest.approx(1.0)

    def test_target_is_scaled(self):
        problem = synthetic_problem(10, 5, 2, Link.sign(), seed=1)
        assert problem.target == pytest.approx(math.sqrt(2 / math.pi) * problem.theta_star)

    def test_dimension_mismatch(self):
        with pytest.raises(PreconditionError):
            Problem(X=np.ones((3, 2)), y=np.ones(4))
        with pytest.raises(PreconditionError):
            Problem(X=np.ones((3, 2)), y=np.ones(3), theta_star=np.array([1.0, 0.0, 0.0]))

    def test_theta_star_must_be_unit(self):
        with pytest.raises(PreconditionError):
            Problem(X=np.ones((3, 2)), y=np.ones(3), theta_star=np.array([1.0, 1.0]))

    def test_radius_without_oracle(self):
        problem = Problem(X=np.ones((3, 2)), y=np.ones(3))
        with pytest.raises(ConfigError):
            resolve_regularizer(Regularizer.l1_ball(), problem)
        assert resolve_regularizer(Regularizer.l1_ball(2.0), problem).radius == 2.0


class TestSolverConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            SolverConfig(record_every=0)
        with pytest.raises(ConfigError):
            SolverConfig(step_size=-1.0)
        with pytest.raises(ConfigError):
            SolverConfig(step_rule="fixed")

    def test_step_rules(self):
        assert SolverConfig().resolve_step(100) == pytest.approx(1 / gamma_mean_norm(100) ** 2)
        assert SolverConfig(step_rule="n").resolve_step(100) == pytest.approx(0.01)
        assert SolverConfig(step_size=0.3).resolve_step(100) == 0.3

    def test_from_dict(self):
        assert SolverConfig.from_dict({"max_iters": 5}).max_iters == 5
        with pytest.raises(ConfigError):
            SolverConfig.from_dict({"iterations": 5})

    def test_bad_theta0(self):
        with pytest.raises(PreconditionError):
            SolverConfig(theta0=np.ones(3)).initial(4)


class TestPGD:
    def test_noiseless_recovery(self):
        problem = synthetic_problem(100, 120, 4, Link.linear(), seed=21)
        trace = pgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=500, timing=False))
        assert trace.final_error < 1e-4

    @pytest.mark.slow
    def test_noiseless_recovery_at_full_scale(self):
        for seed in range(20):
            problem = synthetic_problem(500, 250, 10, Link.linear(), seed=seed)
            trace = pgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=200))
            assert trace.final_error < 1e-6

    def test_zero_iterations(self):
        problem = synthetic_problem(20, 10, 2, Link.sign(), seed=3)
        trace = pgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=0))
        assert len(trace.records) == 1
        assert trace.records[0].iter == 0
        assert trace.final_error == pytest.approx(abs(problem.mu))

    def test_trace_is_thinned(self):
        problem = synthetic_problem(20, 30, 2, Link.sign(), seed=3)
        trace = pgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=25, record_every=10))
        assert trace.iterations.tolist() == [0, 10, 20, 25]

    def test_iterates_are_feasible(self):
        problem = synthetic_problem(50, 40, 3, Link.sign(), seed=5)
        reg = Regularizer.l1_ball()
        trace = pgd_solve(problem, reg, SolverConfig(max_iters=30))
        assert np.abs(trace.theta_hat).sum() <= np.abs(problem.target).sum() + 1e-9

    def test_stop_tolerance(self):
        problem = synthetic_problem(40, 80, 2, Link.linear(), seed=6)
        trace = pgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=1000, stop_tol=1e-8))
        assert trace.iterations[-1] < 1000

    def test_no_timing(self):
        problem = synthetic_problem(20, 10, 2, Link.sign(), seed=3)
        trace = pgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=5, timing=False))
        assert all(record.wall_ms == 0.0 for record in trace.records)

    def test_without_oracle(self):
        X = gaussian_design(30, 10, make_rng(1))
        problem = Problem(X=X, y=np.sign(X[:, 0]))
        trace = pgd_solve(problem, Regularizer.l1_ball(1.0), SolverConfig(max_iters=10))
        assert all(math.isnan(record.error) for record in trace.records)
        assert all(math.isfinite(record.residual) for record in trace.records)

    @pytest.mark.slow
    def test_sparsity_set_reaches_stable_plateau(self):
        reg = Regularizer.sparsity(5)
        for seed in range(5):
            problem = synthetic_problem(500, 450, 5, Link.sign(), seed=seed)
            n0 = minimal_samples(reg, problem.theta_star, samples=5000, seed=seed)
            condition = check_rate_condition(problem.n, n0.n0, kappa(reg))
            # n = 450 ниже 8κ²n₀: гарантии нет, но итерации сходятся
            assert not condition.ok and condition.rate > 1
            trace = pgd_solve(problem, reg, SolverConfig(max_iters=300, allow_nonconvex=True, timing=False))
            tail = trace.errors[-10:]
            assert tail.max() - tail.min() < 1e-4
            assert tail.max() < 0.5 * trace.errors[0]


class TestPSGD:
    def test_kaczmarz_recovery(self):
        problem = synthetic_problem(20, 80, 3, Link.linear(), seed=8)
        trace = psgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=4000, seed=3))
        assert trace.final_error < 1e-6

    def test_nonconvex_requires_flag(self):
        problem = synthetic_problem(20, 40, 3, Link.sign(), seed=8)
        with pytest.raises(PreconditionError):
            psgd_solve(problem, Regularizer.sparsity(3), SolverConfig(max_iters=10))
        trace = psgd_solve(problem, Regularizer.sparsity(3),
                           SolverConfig(max_iters=10, allow_nonconvex=True))
        assert np.count_nonzero(trace.theta_hat) <= 3

    def test_chains_are_aggregated(self):
        problem = synthetic_problem(20, 40, 3, Link.sign(), seed=9)
        trace = psgd_solve(problem, Regularizer.l1_ball(), SolverConfig(max_iters=50, trials=3))
        assert len(trace.trials) == 3
        assert trace.mean_sq_error.shape == (51,)
        expected = np.mean([chain.errors ** 2 for chain in trace.trials], axis=0)
        assert trace.errors == pytest.approx(np.sqrt(expected))
        assert np.array_equal(trace.theta_hat, trace.trials[0].theta_hat)

    def test_deterministic(self):
        problem = synthetic_problem(20, 40, 3, Link.sign(), seed=10)
        config = SolverConfig(max_iters=100, seed=5, timing=False)
        a = psgd_solve(problem, Regularizer.l1_ball(), config)
        b = psgd_solve(problem, Regularizer.l1_ball(), config)
        assert a.records == b.records

    def test_zero_rows_are_never_drawn(self):
        X = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 2.0]])
        rows = sample_rows(row_weights(X), 1000, make_rng(1))
        assert 1 not in rows
        assert row_weights(X) == pytest.approx([0.2, 0.0, 0.8])

    def test_rows_follow_squared_norm_weights(self):
        X = gaussian_design(20, 5, make_rng(29))
        weights = row_weights(X)
        draws = 200_000
        counts = np.bincount(sample_rows(weights, draws, make_rng(30)), minlength=20)
        assert chisquare(counts, f_exp=weights * draws).pvalue > 1e-3

    def test_all_zero_rows(self):
        with pytest.raises(DomainError):
            row_weights(np.zeros((3, 2)))


class TestProxGD:
    def test_vanishing_penalty_dense(self):
        problem = synthetic_problem(20, 320, 20, Link.linear(), seed=12)
        trace = proxgd_solve(problem, lambda0=1e-9, lambda_min=1e-9, rho=1.0,
                             config=SolverConfig(max_iters=200))
        assert trace.final_error < 1e-4

    def test_schedule_is_geometric(self):
        problem = synthetic_problem(20, 40, 3, Link.sign(), seed=13)
        trace = proxgd_solve(problem, lambda0=1.0, rho=0.5, lambda_min=0.2,
                             config=SolverConfig(max_iters=4))
        assert [entry[1] for entry in trace.schedule] == pytest.approx([1.0, 0.5, 0.25, 0.2])

    def test_external_denoiser(self):
        problem = synthetic_problem(20, 40, 3, Link.sign(), seed=13)
        calls = []

        def denoiser(v, lam):
            calls.append(lam)
            return np.clip(v, -0.5, 0.5)

        proxgd_solve(problem, prox=denoiser, config=SolverConfig(max_iters=3))
        assert len(calls) == 3

    def test_divergence(self):
        problem = synthetic_problem(10, 40, 2, Link.linear(), seed=14)
        with pytest.raises(DivergenceError) as e:
            proxgd_solve(problem, prox=lambda v, lam: v, config=SolverConfig(max_iters=100, step_size=10.0))
        assert e.value.iteration is not None

    def test_parameter_checks(self):
        problem = synthetic_problem(10, 20, 2, Link.sign(), seed=1)
        with pytest.raises(ConfigError):
            proxgd_solve(problem, rho=1.5)
        with pytest.raises(DomainError):
            proxgd_solve(problem, lambda0=-1.0)


class TestLambdaSchedule:
    def test_noiseless_step(self):
        schedule = ProxSchedule(M0=1.0, rho=0.5, lam=2.0)
        lam_tau, M_next = lambda_schedule_step(1.0, schedule, None, 100, None, 10.0)
        assert lam_tau == pytest.approx(0.2)
        assert M_next == pytest.approx(0.5)

    def test_noisy_step(self):
        stats = LinkStats(1.0, 0.36, 0.36)
        schedule = ProxSchedule(M0=1.0, rho=0.5, lam=1.0, t=1.0, eta=1.0, stats=stats, n0_lambda=25.0)
        lam_tau, M_next = lambda_schedule_step(0.5, schedule, stats, 100, 25.0, 10.0)
        assert lam_tau == pytest.approx(0.115)
        assert M_next == pytest.approx(0.61)

    @pytest.mark.parametrize("rho", [0.0, 1.0, 1.2])
    def test_rho_range(self, rho):
        with pytest.raises(ConfigError):
            ProxSchedule(M0=1.0, rho=rho, lam=1.0)

    def test_noise_needs_stats(self):
        with pytest.raises(ConfigError):
            ProxSchedule(M0=1.0, rho=0.5, lam=1.0, eta=1.0)


class TestResampledProx:
    def _setup(self, seed: int, p: int = 100, s: int = 5, n: int = 400, eta: float = 2.0):
        link = Link.sign()
        stats = link_stats(link)
        theta = sparse_unit_vector(p, s, make_rng(seed))
        n0 = minimal_samples(Regularizer.l1_ball(), theta)
        schedule = ProxSchedule(M0=stats.mu, rho=math.sqrt(n0.n0 / n), lam=n0.lam, eta=eta,
                                stats=stats, n0_lambda=n0.n0)
        source = ResamplingSource(link, theta, n, seed=seed, mu=stats.mu)
        return source, schedule

    def test_history_and_schedule(self):
        source, schedule = self._setup(1)
        trace = proxgd_resampled_solve(source, Regularizer.l1_ball(), schedule, SolverConfig(max_iters=5))
        assert len(trace.schedule) == 6
        assert [entry[0] for entry in trace.schedule] == list(range(6))
        assert trace.schedule[0][2] == pytest.approx(schedule.M0)
        assert all(b[2] < a[2] for a, b in zip(trace.schedule, trace.schedule[1:]))

    def test_exhausted_source(self):
        link = Link.sign()
        theta = sparse_unit_vector(20, 2, make_rng(2))
        source = ResamplingSource(link, theta, 30, seed=2, max_batches=3)
        schedule = ProxSchedule(M0=1.0, rho=0.5, lam=1.0)
        with pytest.raises(ResourceError):
            proxgd_resampled_solve(source, Regularizer.l1_ball(), schedule, SolverConfig(max_iters=5))

    def test_batches_are_deterministic(self):
        theta = sparse_unit_vector(10, 2, make_rng(3))
        a = ResamplingSource(Link.sign(), theta, 15, seed=4)
        b = ResamplingSource(Link.sign(), theta, 15, seed=4)
        first_a, second_a = next(a), next(a)
        first_b = next(b)
        assert np.array_equal(first_a.X, first_b.X)
        assert not np.array_equal(first_a.X, second_a.X)

    @pytest.mark.slow
    def test_error_stays_below_recursion(self):
        held = 0
        for seed in range(100):
            source, schedule = self._setup(seed)
            trace = proxgd_resampled_solve(source, Regularizer.l1_ball(), schedule,
                                           SolverConfig(max_iters=20, timing=False))
            bounds = [entry[2] for entry in trace.schedule]
            held += all(record.error <= bounds[record.iter] + 1e-12 for record in trace.records)
        assert held >= 90
