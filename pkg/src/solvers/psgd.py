"""
Проективный стохастический градиентный спуск (PSGD) с выбором строк по весам ||x_i||²
"""

import math
from typing import List

import numpy as np

from src.exceptions import DomainError, PreconditionError
from src.gaussian import make_rng
from src.geometry import Regularizer
from src.solvers.problem import Problem, SolverConfig, resolve_regularizer
from src.solvers.trace import SolverTrace, TraceRecord, TraceRecorder
from src.utils.logger import logger


def row_weights(X: np.ndarray) -> np.ndarray:
    """Вероятности выбора строк ||x_i||² / ||X||_F²"""
    sq = np.einsum("ij,ij->i", X, X)
    total = float(sq.sum())
    if total == 0:
        raise DomainError("Все строки X нулевые")
    return sq / total


def sample_rows(weights: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """
    Индексы строк ψ_1..ψ_size

    Строки нулевой нормы имеют нулевой вес и никогда не выбираются, что
    совпадает с повторным выбором при попадании на такую строку.
    """
    return rng.choice(weights.size, size=size, p=weights)


def _chain(problem: Problem, reg: Regularizer, config: SolverConfig, weights: np.ndarray,
           row_sq: np.ndarray, stream: int) -> SolverTrace:
    X, y = problem.X, problem.y
    rng = make_rng(config.seed, stream)
    indices = sample_rows(weights, config.max_iters, rng)
    theta = config.initial(problem.p)

    recorder = TraceRecorder("psgd", problem.target, X, y, config.record_every, config.timing)
    recorder.record(theta, 0, force=True)

    for iteration, i in enumerate(indices, start=1):
        x = X[i]
        # Шаг Качмажа на гиперплоскость ⟨x_i, θ⟩ = y_i, затем проекция
        updated = reg.project(theta + (y[i] - x @ theta) / row_sq[i] * x)
        step = float(np.linalg.norm(updated - theta))
        theta = updated
        if config.stop_tol > 0 and step < config.stop_tol:
            recorder.record(theta, iteration, force=True)
            break
        recorder.record(theta, iteration, force=iteration == config.max_iters)

    return recorder.finish(theta)


def _aggregate(chains: List[SolverTrace]) -> SolverTrace:
    """Средние по цепочкам на общем префиксе записей"""
    length = min(len(chain.records) for chain in chains)
    sq_errors = np.array([chain.errors[:length] ** 2 for chain in chains])
    residuals = np.array([chain.residuals[:length] for chain in chains])
    mean_sq = sq_errors.mean(axis=0)

    records = [
        TraceRecord(
            iter=chains[0].records[k].iter,
            error=math.sqrt(mean_sq[k]) if math.isfinite(mean_sq[k]) else math.nan,
            residual=float(residuals[:, k].mean()),
            wall_ms=max(chain.records[k].wall_ms for chain in chains),
        )
        for k in range(length)
    ]
    return SolverTrace(
        solver="psgd",
        records=records,
        theta_hat=chains[0].theta_hat,
        trials=chains,
        mean_sq_error=mean_sq,
    )


def psgd_solve(problem: Problem, reg: Regularizer, config: SolverConfig = SolverConfig()) -> SolverTrace:
    """
    θ_{τ+1} = P_K(θ_τ + (y_ψ - ⟨x_ψ, θ_τ⟩)/||x_ψ||² · x_ψ)

    config.trials независимых цепочек на одной и той же X, цепочка k
    использует поток k зерна config.seed. Записи итоговой трассы - корень
    из среднего квадрата ошибки; сам средний квадрат - в mean_sq_error.
    θ̂ итоговой трассы - оценка цепочки 0.

    Raises:
        PreconditionError: для невыпуклого регуляризатора без allow_nonconvex
    """
    reg = resolve_regularizer(reg, problem)
    if not reg.is_convex and not config.allow_nonconvex:
        raise PreconditionError(
            "PSGD требует выпуклый регуляризатор",
            detail="для невыпуклого задайте allow_nonconvex",
        )

    row_sq = np.einsum("ij,ij->i", problem.X, problem.X)
    weights = row_weights(problem.X)

    logger.debug(
        f"PSGD: n={problem.n}, p={problem.p}, {reg.kind}, итераций {config.max_iters}, "
        f"цепочек {config.trials}"
    )
    chains = [_chain(problem, reg, config, weights, row_sq, k) for k in range(config.trials)]
    trace = _aggregate(chains)
    logger.debug(f"PSGD завершен: средняя ошибка {trace.final_error:.6e}")
    return trace
