"""
Эксперименты: однобитовые наблюдения против зашумленной линейной модели
и масштабирование PSGD по размерности
"""

import asyncio
import math
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Tuple, TypeVar

import numpy as np

from src.bounds import (
    BoundCurve,
    check_rate_condition,
    kappa,
    pgd_bound_curve,
    pgd_success_probability,
    psgd_bound_curve,
)
from src.config import get_settings
from src.config.constants import MEAN_FILENAME, PLATEAU_WINDOW, SUMMARY_FILENAME
from src.config.experiment import ExperimentConfig
from src.exceptions import ConfigError, EstimationError
from src.gaussian import RngSeed, make_rng
from src.geometry import Regularizer, minimal_samples
from src.harness import io
from src.links import LinkStats, concentration_probe, link_stats
from src.solvers import (
    Problem,
    SolverConfig,
    SolverTrace,
    TraceRecord,
    noisy_linear_problem,
    pgd_solve,
    proxgd_solve,
    psgd_solve,
    resolve_regularizer,
    synthetic_problem,
)
from src.utils.logger import logger
from src.utils.stats import RunStatistics

T = TypeVar("T")

# Поток зерна испытания для шума линейной модели (0 - θ*, 1 - X)
NOISE_STREAM = 3

# Испытаний пробы концентрации для вероятности оценки
PROBE_TRIALS = 2000

# proxgd-resampled запускается только командой solve
EXPERIMENT_SOLVERS = ("pgd", "psgd", "proxgd")


async def gather_trials(job: Callable[[int], T], trials: int, stats: RunStatistics,
                        max_workers: Optional[int] = None) -> Dict[int, T]:
    """
    Параллельный запуск испытаний 0..trials-1 в пуле потоков

    Результаты индексируются номером испытания, поэтому не зависят от
    порядка завершения. Испытания с EstimationError логируются и пропускаются.
    """
    semaphore = asyncio.Semaphore(max_workers or get_settings().max_workers)

    async def run(k: int) -> Tuple[int, Optional[T]]:
        async with semaphore:
            try:
                result = await asyncio.to_thread(job, k)
            except EstimationError as e:
                stats.increment_failed()
                logger.error(f"Испытание {k} завершилось ошибкой: {e}")
                return k, None
            stats.increment_completed()
            if stats.should_log_stats():
                logger.info(stats.get_log_stats())
            return k, result

    results = await asyncio.gather(*(run(k) for k in range(trials)))
    return {k: result for k, result in results if result is not None}


def mean_trace(traces: List[SolverTrace], solver: str) -> SolverTrace:
    """Поэлементное среднее записей по испытаниям (на общем префиксе)"""
    length = min(len(trace.records) for trace in traces)
    errors = np.array([trace.errors[:length] for trace in traces])
    residuals = np.array([trace.residuals[:length] for trace in traces])
    walls = np.array([[r.wall_ms for r in trace.records[:length]] for trace in traces])
    records = [
        TraceRecord(traces[0].records[k].iter, float(errors[:, k].mean()),
                    float(residuals[:, k].mean()), float(walls[:, k].mean()))
        for k in range(length)
    ]
    return SolverTrace(solver=solver, records=records, theta_hat=traces[0].theta_hat)


def _record_at(trace: SolverTrace, iteration: int) -> Optional[float]:
    for record in trace.records:
        if record.iter == iteration:
            return record.error
    return None


def bound_domination(trace: SolverTrace, curve: BoundCurve, squared: bool = False,
                     step: int = 1) -> Optional[float]:
    """
    Доля записанных итераций, на которых ошибка не выше теоретической оценки

    curve.values индексируются τ/step; squared сравнивает средний квадрат
    ошибки (PSGD). None, если оценка невалидна.
    """
    if not curve.valid:
        return None
    iterations = np.array([record.iter for record in trace.records])
    errors = trace.errors
    if squared:
        errors = trace.mean_sq_error if trace.mean_sq_error is not None else errors ** 2
    index = iterations // step
    inside = (iterations % step == 0) & (index < curve.values.size)
    if not inside.any():
        return None
    return float(np.mean(errors[inside] <= curve.values[index[inside]]))


def run_solver(name: str, problem: Problem, reg: Regularizer, config: SolverConfig,
               options: Dict[str, float]) -> SolverTrace:
    """
    Запуск решателя по имени

    Raises:
        ConfigError: для proxgd-resampled (ему нужен генератор батчей, см. solve)
    """
    if name == "pgd":
        return pgd_solve(problem, reg, config)
    if name == "psgd":
        return psgd_solve(problem, reg, config)
    if name == "proxgd":
        tuned = resolve_regularizer(reg, problem)
        return proxgd_solve(
            problem,
            prox=tuned.prox,
            lambda0=options.get("lambda0", 1.0),
            rho=options.get("rho", 0.95),
            lambda_min=options.get("lambda_min", 0.0),
            config=config,
        )
    raise ConfigError(f"Решатель {name} не поддерживается в экспериментах", field="solver.name")


def _n0(reg: Regularizer, theta: np.ndarray, t: float, seed: int):
    return minimal_samples(reg, theta, t, seed=seed)


def _predicted_plateau(n0: float, n: int, stats: LinkStats) -> float:
    """√(n₀/n)·σ - порядок установившейся ошибки"""
    return math.sqrt(n0 / n) * stats.sigma


async def run_onebit_vs_linear(config: ExperimentConfig, max_workers: Optional[int] = None) -> dict:
    """
    PGD на однобитовых наблюдениях и на линейной модели y = μXθ* + w, w ~ N(0, σ²I)

    Обе модели используют одни и те же X и θ* в каждом испытании. Пишет
    trial_XXX_onebit.csv, trial_XXX_linear.csv, mean.csv (однобитовая модель),
    mean_linear.csv, bound.csv и summary.json.
    """
    if config.solver not in EXPERIMENT_SOLVERS:
        raise ConfigError(f"Решатель {config.solver} не поддерживается в экспериментах", field="solver.name")
    p, n, s = config.p, config.samples, config.sparsity
    link = config.link
    stats = link_stats(link, seed=config.seed)
    solver_config = replace(config.solver_config, timing=config.timing)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    root = RngSeed(config.seed)

    logger.info(
        f"Эксперимент {config.kind}: p={p}, n={n}, s={s}, связь {link.kind}, "
        f"испытаний {config.trials}, вывод в {out}"
    )

    def trial(k: int) -> Tuple[SolverTrace, SolverTrace, np.ndarray]:
        seed = root.child(k)
        onebit = synthetic_problem(p, n, s, link, seed=seed, stats=stats)
        linear = noisy_linear_problem(onebit.X, onebit.theta_star, stats.mu, stats.sigma,
                                      make_rng(seed, NOISE_STREAM))
        config_k = replace(solver_config, seed=seed.seed)
        onebit_trace = run_solver(config.solver, onebit, config.regularizer, config_k, config.solver_options)
        linear_trace = run_solver(config.solver, linear, config.regularizer, config_k, config.solver_options)
        io.write_trace(out / f"trial_{k:03d}_onebit.csv", onebit_trace)
        io.write_trace(out / f"trial_{k:03d}_linear.csv", linear_trace)
        return onebit_trace, linear_trace, onebit.theta_star

    run_stats = RunStatistics(total_trials=config.trials, report_interval=get_settings().stats_report_interval)
    results = await gather_trials(trial, config.trials, run_stats, max_workers)
    run_stats.finish()
    if not results:
        raise EstimationError("Ни одно испытание не завершилось успешно")

    keys = sorted(results)
    onebit_mean = mean_trace([results[k][0] for k in keys], "pgd-onebit")
    linear_mean = mean_trace([results[k][1] for k in keys], "pgd-linear")
    io.write_trace(out / MEAN_FILENAME, onebit_mean)
    io.write_trace(out / "mean_linear.csv", linear_mean)

    theta_ref = results[keys[0]][2]
    n0 = _n0(config.regularizer, theta_ref, config.t, config.seed)
    k_reg = kappa(config.regularizer)
    condition = check_rate_condition(n, n0.n0, k_reg)
    curve = pgd_bound_curve(solver_config.max_iters, n, n0.n0, k_reg, config.eta,
                            stats.sigma, stats.gamma, init_error=abs(stats.mu))
    io.write_bound(out / "bound.csv", curve)
    probe = concentration_probe(link, n, config.eta, PROBE_TRIALS, root.child(config.trials), stats=stats)

    onebit_plateau = onebit_mean.plateau(PLATEAU_WINDOW)
    linear_plateau = linear_mean.plateau(PLATEAU_WINDOW)
    relative_errors = [results[k][0].relative_error(stats.mu * results[k][2]) for k in keys]
    trial_domination = [bound_domination(results[k][0], curve) for k in keys]
    runs_dominated = None if not curve.valid else float(np.mean([d == 1.0 for d in trial_domination]))

    summary = {
        "experiment": config.kind,
        "config": config.to_dict(),
        "link_stats": stats.to_dict(),
        "n0": n0.to_dict(),
        "rate_condition": {"ok": condition.ok, "margin": condition.margin, "rate": condition.rate},
        "bound": {**curve.to_dict(), "p_eta": probe.p_hat,
                  "success_probability": pgd_success_probability(probe.p_hat, config.t)},
        "plateau": {
            "window": PLATEAU_WINDOW,
            "onebit": onebit_plateau,
            "linear": linear_plateau,
            "relative_difference": abs(onebit_plateau - linear_plateau) / max(linear_plateau, 1e-300),
            "predicted": _predicted_plateau(n0.n0, n, stats),
        },
        "first_iteration": {
            "onebit": _record_at(onebit_mean, 1),
            "linear": _record_at(linear_mean, 1),
        },
        "bound_domination": {"mean": bound_domination(onebit_mean, curve), "runs": runs_dominated},
        "relative_error": {"onebit_mean": float(np.mean(relative_errors))},
        "run": run_stats.to_dict(include_timing=config.timing),
    }
    io.write_json(out / SUMMARY_FILENAME, summary)
    logger.info(
        f"Готово: плато однобитовой модели {onebit_plateau:.4g}, линейной {linear_plateau:.4g} "
        f"({run_stats.get_log_stats()})"
    )
    return summary


def _half_error_iteration(trace: SolverTrace) -> Optional[int]:
    """Первая записанная итерация, на которой ошибка упала вдвое"""
    errors = trace.errors
    for record, error in zip(trace.records, errors):
        if error <= 0.5 * errors[0]:
            return record.iter
    return None


async def run_psgd_scaling(config: ExperimentConfig, max_workers: Optional[int] = None) -> dict:
    """
    PSGD при n = 4p, s = 0.1p для каждого p из p_list и PGD на тех же данных

    Для каждого p пишет p{p}/trial_XXX_psgd.csv, p{p}/mean.csv (корень из
    среднего квадрата ошибки PSGD), p{p}/mean_pgd.csv и p{p}/bound.csv
    (оценка среднего квадрата ошибки); общий summary.json.
    """
    link = config.link
    stats = link_stats(link, seed=config.seed)
    reg = config.regularizer
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    root = RngSeed(config.seed)
    per_p = {}
    run_stats = RunStatistics(total_trials=config.trials * len(config.p_list),
                              report_interval=get_settings().stats_report_interval)

    for p in config.p_list:
        dims = config.dims_for(p)
        n, s = dims["n"], dims["s"]
        p_reg = Regularizer.sparsity(s) if reg.kind == "sparsity" else reg
        psgd_iters = config.iters_per_dim * p
        record_every = max(1, p // 10)
        psgd_config = replace(config.solver_config, max_iters=psgd_iters, trials=1,
                              record_every=record_every, timing=config.timing)
        pgd_config = replace(config.solver_config, timing=config.timing, record_every=1)
        p_dir = out / f"p{p}"
        p_seed = root.child(p)

        logger.info(f"PSGD: p={p}, n={n}, s={s}, {psgd_iters} итераций, испытаний {config.trials}")

        def trial(k: int, p=p, n=n, s=s, p_dir=p_dir, p_seed=p_seed,
                  psgd_config=psgd_config, pgd_config=pgd_config, p_reg=p_reg) -> Tuple[SolverTrace, SolverTrace, np.ndarray]:
            seed = p_seed.child(k)
            problem = synthetic_problem(p, n, s, link, seed=seed, stats=stats)
            psgd_trace = psgd_solve(problem, p_reg, replace(psgd_config, seed=seed.seed))
            pgd_trace = pgd_solve(problem, p_reg, pgd_config)
            io.write_trace(p_dir / f"trial_{k:03d}_psgd.csv", psgd_trace)
            return psgd_trace, pgd_trace, problem.theta_star

        results = await gather_trials(trial, config.trials, run_stats, max_workers)
        if not results:
            raise EstimationError(f"Ни одно испытание для p={p} не завершилось успешно")
        keys = sorted(results)

        psgd_traces = [results[k][0] for k in keys]
        length = min(len(trace.records) for trace in psgd_traces)
        mean_sq = np.mean([trace.errors[:length] ** 2 for trace in psgd_traces], axis=0)
        psgd_mean = mean_trace(psgd_traces, "psgd")
        psgd_mean = SolverTrace(
            solver="psgd",
            records=[replace(record, error=math.sqrt(mean_sq[i]))
                     for i, record in enumerate(psgd_mean.records)],
            theta_hat=psgd_mean.theta_hat,
            mean_sq_error=mean_sq,
        )
        pgd_mean = mean_trace([results[k][1] for k in keys], "pgd")
        io.write_trace(p_dir / MEAN_FILENAME, psgd_mean)
        io.write_trace(p_dir / "mean_pgd.csv", pgd_mean)

        theta_ref = results[keys[0]][2]
        n0 = _n0(p_reg, theta_ref, config.t, config.seed)
        curve = psgd_bound_curve(psgd_iters, n, n0.n0, p, config.eta, stats.sigma,
                                 init_error_sq=stats.mu ** 2, record_every=record_every)
        io.write_bound(p_dir / "bound.csv", curve, iterations=list(range(0, psgd_iters + 1, record_every)))

        psgd_plateau = psgd_mean.plateau(PLATEAU_WINDOW)
        pgd_plateau = pgd_mean.plateau(PLATEAU_WINDOW)
        per_p[str(p)] = {
            "n": n,
            "s": s,
            "iterations": psgd_iters,
            "record_every": record_every,
            "n0": n0.to_dict(),
            "psgd_plateau": psgd_plateau,
            "pgd_plateau": pgd_plateau,
            "plateau_ratio": psgd_plateau / max(pgd_plateau, 1e-300),
            "half_error_iteration": _half_error_iteration(psgd_mean),
            "bound": curve.to_dict(),
            "bound_domination": bound_domination(psgd_mean, curve, squared=True, step=record_every),
        }
        logger.info(f"p={p}: плато PSGD {psgd_plateau:.4g}, PGD {pgd_plateau:.4g}")

    run_stats.finish()
    summary = {
        "experiment": config.kind,
        "config": config.to_dict(),
        "link_stats": stats.to_dict(),
        "plateau_window": PLATEAU_WINDOW,
        "dimensions": per_p,
        "run": run_stats.to_dict(include_timing=config.timing),
    }
    io.write_json(out / SUMMARY_FILENAME, summary)
    return summary


async def run_experiment(config: ExperimentConfig, max_workers: Optional[int] = None) -> dict:
    if config.kind == "onebit-vs-linear":
        return await run_onebit_vs_linear(config, max_workers)
    if config.kind == "psgd-scaling":
        return await run_psgd_scaling(config, max_workers)
    raise ConfigError(f"Неизвестный вид эксперимента: {config.kind}", field="kind")
