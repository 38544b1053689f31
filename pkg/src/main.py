"""
Точка входа в приложение: python -m src.main <команда> ...
"""

import argparse
import asyncio
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from src.bounds import pgd_bound_curve, prox_bound_curve, psgd_bound_curve
from src.config import get_settings
from src.config.constants import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_ERROR,
    EXIT_OK,
    SUMMARY_FILENAME,
)
from src.config.experiment import ExperimentConfig
from src.exceptions import ConfigError, EstimationError
from src.gaussian import make_rng
from src.geometry import Regularizer, minimal_samples, minimal_samples_regularized
from src.harness import io, run_experiment, validate_effective_noise, validate_restricted_eigs
from src.harness.experiments import run_solver
from src.harness.lemmas import EFFECTIVE_NOISE, RESTRICTED_EIGS
from src.links import Link, link_stats, link_stats_mc
from src.solvers import (
    ProxSchedule,
    ResamplingSource,
    SolverTrace,
    proxgd_resampled_solve,
    sparse_unit_vector,
    synthetic_problem,
)
from src.utils.logger import logger, setup_logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m src.main",
        description="Оценивание параметра по нелинейным наблюдениям итерационным сжатием",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="JSON файл конфигурации")
        p.add_argument("--seed", type=int, help="переопределить зерно")
        p.add_argument("--out", help="директория вывода")
        p.add_argument("--trials", type=int, help="переопределить число испытаний")

    solve = sub.add_parser("solve", help="один запуск решателя на синтетической задаче")
    add_run_flags(solve)

    experiment = sub.add_parser("experiment", help="эксперимент по конфигурации")
    add_run_flags(experiment)

    stats = sub.add_parser("stats", help="параметры нелинейности μ, σ², γ²")
    stats.add_argument("--link", required=True, help="linear | sign | cubic | quantize | tanh-scale")
    stats.add_argument("--levels", type=int, help="число уровней квантователя")
    stats.add_argument("--clip", type=float, help="порог насыщения квантователя")
    stats.add_argument("--scale", type=float, help="параметр c для tanh(c·z)")
    stats.add_argument("--mc", action="store_true", help="оценка Монте-Карло даже при наличии формулы")
    stats.add_argument("--samples", type=int, default=1_000_000)
    stats.add_argument("--seed", type=int)

    n0 = sub.add_parser("n0", help="минимальное число выборок n₀")
    n0.add_argument("--reg", required=True, help="l1 | l2 | sparsity")
    n0.add_argument("--p", type=int, required=True)
    n0.add_argument("--s", type=int, required=True)
    n0.add_argument("--t", type=float, default=0.0)
    n0.add_argument("--lam", type=float, help="n₀(λ) для фиксированного λ вместо минимума по сетке")
    n0.add_argument("--seed", type=int)

    bound = sub.add_parser("bound", help="теоретическая кривая iter,bound")
    bound.add_argument("--kind", choices=("pgd", "psgd", "prox"), required=True)
    bound.add_argument("--iters", type=int, default=200)
    bound.add_argument("--n", type=float, required=True)
    bound.add_argument("--n0", type=float, required=True)
    bound.add_argument("--p", type=int, default=1)
    bound.add_argument("--kappa", type=int, choices=(1, 2), default=1)
    bound.add_argument("--eta", type=float, default=1.0)
    bound.add_argument("--sigma", type=float, default=0.0)
    bound.add_argument("--gamma", type=float, default=0.0)
    bound.add_argument("--init", type=float, default=1.0, help="начальная ошибка (M₀ для prox)")
    bound.add_argument("--rho", type=float, default=0.5)
    bound.add_argument("--out", help="CSV файл (по умолчанию JSON в stdout)")

    validate = sub.add_parser("validate", help="Монте-Карло проверка лемм")
    validate.add_argument("--lemma", choices=(RESTRICTED_EIGS, EFFECTIVE_NOISE), required=True)
    validate.add_argument("--reg", default="l1")
    validate.add_argument("--link", default="sign")
    validate.add_argument("--p", type=int, default=100)
    validate.add_argument("--s", type=int, default=5)
    validate.add_argument("--n", type=int, help="по умолчанию 64·n₀")
    validate.add_argument("--t", type=float, default=0.0)
    validate.add_argument("--eta", type=float, default=3.0)
    validate.add_argument("--trials", type=int, default=200)
    validate.add_argument("--seed", type=int)

    return parser


def _regularizer(kind: str, s: int) -> Regularizer:
    if kind in ("sparsity", "l0", "sparse"):
        return Regularizer.sparsity(s)
    return Regularizer(kind)


def _link(args: argparse.Namespace) -> Link:
    data = {"kind": args.link}
    for key in ("levels", "clip", "scale"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return Link.from_dict(data)


def _print(data: dict) -> None:
    print(io.dumps(data))


def command_solve(args: argparse.Namespace) -> int:
    config = ExperimentConfig.load(args.config).with_overrides(seed=args.seed, out=args.out)
    out = config.output_dir
    stats = link_stats(config.link, seed=config.seed)
    problem = synthetic_problem(config.p, config.samples, config.sparsity, config.link,
                                seed=config.seed, stats=stats)
    solver_config = replace(config.solver_config, seed=config.seed, timing=config.timing)
    if args.trials is not None:
        solver_config = replace(solver_config, trials=args.trials)

    if config.solver == "proxgd-resampled":
        trace = _solve_resampled(config, problem.theta_star, stats, solver_config)
        io.write_schedule(out / "schedule.csv", trace)
    else:
        trace = run_solver(config.solver, problem, config.regularizer, solver_config, config.solver_options)

    io.write_trace(out / "trace.csv", trace)
    summary = {
        "solver": config.solver,
        "config": config.to_dict(),
        "link_stats": stats.to_dict(),
        "final_error": trace.final_error,
        "plateau": trace.plateau(),
        "relative_error": trace.relative_error(problem.target),
        "records": len(trace.records),
    }
    io.write_json(out / SUMMARY_FILENAME, summary)
    logger.info(f"Решение записано в {out}: ошибка {trace.final_error:.6g}")
    return EXIT_OK


def _solve_resampled(config: ExperimentConfig, theta_star: np.ndarray, stats, solver_config) -> SolverTrace:
    """Схема с пересэмплированием в оракульном режиме"""
    n = config.samples
    options = config.solver_options
    reg = config.regularizer
    if "lam" in options:
        n0 = minimal_samples_regularized(reg, theta_star, options["lam"], config.t)
    else:
        n0 = minimal_samples(reg, theta_star, config.t)
    rho = options.get("rho", math.sqrt(n0.n0 / n))
    schedule = ProxSchedule(
        M0=options.get("M0", abs(stats.mu)),
        rho=rho,
        lam=n0.lam if n0.lam is not None else 0.0,
        t=config.t,
        eta=config.eta,
        stats=stats,
        n0_lambda=n0.n0,
    )
    source = ResamplingSource(config.link, theta_star, n, seed=config.seed,
                              mu=stats.mu, max_batches=solver_config.max_iters)
    return proxgd_resampled_solve(source, reg, schedule, solver_config)


def command_experiment(args: argparse.Namespace) -> int:
    config = ExperimentConfig.load(args.config).with_overrides(
        seed=args.seed, out=args.out, trials=args.trials
    )
    asyncio.run(run_experiment(config))
    logger.info(f"Результаты: {config.output_dir}")
    return EXIT_OK


def command_stats(args: argparse.Namespace) -> int:
    link = _link(args)
    seed = get_settings().default_seed if args.seed is None else args.seed
    if args.mc:
        stats = link_stats_mc(link, args.samples, seed)
    else:
        stats = link_stats(link, samples=args.samples, seed=seed)
    _print({"link": link.to_dict(), **stats.to_dict()})
    return EXIT_OK


def command_n0(args: argparse.Namespace) -> int:
    seed = get_settings().default_seed if args.seed is None else args.seed
    reg = _regularizer(args.reg, args.s)
    theta = sparse_unit_vector(args.p, args.s, make_rng(seed))
    if args.lam is not None:
        result = minimal_samples_regularized(reg, theta, args.lam, args.t, seed=seed)
    else:
        result = minimal_samples(reg, theta, args.t, seed=seed)
    _print({"regularizer": reg.to_dict(), "p": args.p, "s": args.s, **result.to_dict()})
    return EXIT_OK


def command_bound(args: argparse.Namespace) -> int:
    if args.kind == "pgd":
        curve = pgd_bound_curve(args.iters, args.n, args.n0, args.kappa, args.eta,
                                args.sigma, args.gamma, args.init)
    elif args.kind == "psgd":
        curve = psgd_bound_curve(args.iters, args.n, args.n0, args.p, args.eta,
                                 args.sigma, args.init ** 2)
    else:
        curve = prox_bound_curve(args.iters, args.init, args.rho, args.eta, args.sigma,
                                 args.gamma, args.n, args.n0)
    if args.out:
        io.write_bound(Path(args.out), curve)
        logger.info(f"Кривая записана в {args.out}")
    else:
        _print({**curve.to_dict(), "values": curve.values})
    return EXIT_OK


def command_validate(args: argparse.Namespace) -> int:
    seed = get_settings().default_seed if args.seed is None else args.seed
    reg = _regularizer(args.reg, args.s)
    theta = sparse_unit_vector(args.p, args.s, make_rng(seed))
    n0 = minimal_samples(reg, theta, args.t, seed=seed).n0
    n = args.n or int(math.ceil(64 * n0))
    if args.lemma == RESTRICTED_EIGS:
        report = validate_restricted_eigs(reg, theta, n, args.p, args.t, args.trials, seed, n0=n0)
    else:
        link = Link.from_dict({"kind": args.link})
        report = validate_effective_noise(link, reg, theta, n, args.p, args.eta, args.t,
                                          args.trials, seed, n0=n0)
    _print(report.to_dict())
    return EXIT_OK


COMMANDS = {
    "solve": command_solve,
    "experiment": command_experiment,
    "stats": command_stats,
    "n0": command_n0,
    "bound": command_bound,
    "validate": command_validate,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Разбор аргументов и запуск команды

    Returns:
        int: 0 - успех, 1 - ошибка конфигурации, 2 - численная ошибка
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG_ERROR

    try:
        settings = get_settings()
    except ValueError as e:
        logger.error(f"Ошибка настроек: {e}")
        return EXIT_CONFIG_ERROR

    setup_logger(settings.logs_dir, settings.log_level)
    logger.debug(f"Команда {args.command}: {settings}")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Ошибка конфигурации: {e}")
        return EXIT_CONFIG_ERROR
    except (EstimationError, FloatingPointError, ValueError, np.linalg.LinAlgError) as e:
        logger.error(f"Численная ошибка: {e}")
        return EXIT_NUMERICAL_ERROR


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
