"""
Проективный градиентный спуск (PGD)
"""

import numpy as np

from src.geometry import Regularizer
from src.solvers.problem import Problem, SolverConfig, resolve_regularizer
from src.solvers.trace import SolverTrace, TraceRecorder
from src.utils.logger import logger


def pgd_solve(problem: Problem, reg: Regularizer, config: SolverConfig = SolverConfig()) -> SolverTrace:
    """
    θ_{τ+1} = P_K(θ_τ + α Xᵀ(y - Xθ_τ)), K = {R(θ) <= R}

    Без явного уровня R шара используется оракульная настройка R = R(μθ*).
    Трасса начинается с θ₀ (по умолчанию 0) и содержит не больше
    max_iters + 1 записей.

    Raises:
        PreconditionError: если размерности не согласованы
        DivergenceError: если итерации разошлись
    """
    reg = resolve_regularizer(reg, problem)
    X, y = problem.X, problem.y
    alpha = config.resolve_step(problem.n)
    theta = config.initial(problem.p)

    logger.debug(
        f"PGD: n={problem.n}, p={problem.p}, {reg.kind} (уровень {reg.level}), "
        f"α={alpha:.4e}, итераций {config.max_iters}"
    )

    recorder = TraceRecorder("pgd", problem.target, X, y, config.record_every, config.timing)
    recorder.record(theta, 0, force=True)

    iteration = 0
    for iteration in range(1, config.max_iters + 1):
        updated = reg.project(theta + alpha * (X.T @ (y - X @ theta)))
        step = float(np.linalg.norm(updated - theta))
        theta = updated
        last = iteration == config.max_iters
        if config.stop_tol > 0 and step < config.stop_tol:
            recorder.record(theta, iteration, force=True)
            logger.debug(f"PGD: останов на итерации {iteration}, шаг {step:.3e}")
            break
        recorder.record(theta, iteration, force=last)

    logger.debug(f"PGD завершен: {iteration} итераций, ошибка {recorder.error(theta):.6e}")
    return recorder.finish(theta)
