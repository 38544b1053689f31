"""
Проксимальный градиентный спуск: схема с пересэмплированием и практическая схема
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Tuple

import numpy as np

from src.exceptions import ConfigError, DivergenceError, DomainError, ResourceError
from src.gaussian import gamma_mean_norm
from src.geometry import Regularizer, prox_l1
from src.links import LinkStats
from src.solvers.problem import Problem, SolverConfig
from src.solvers.trace import SolverTrace, TraceRecorder
from src.utils.logger import logger

ProxOperator = Callable[[np.ndarray, float], np.ndarray]


@dataclass
class ProxSchedule:
    """
    Параметры рекурсии λ_τ / M_τ

    M0: начальная оценка ошибки (M₀ >= ||θ₀ - μθ*||)
    rho: множитель сжатия в (0, 1)
    lam: уровень λ в n₀(λ)
    stats, n0_lambda: σ, γ и n₀(λ) для шумовых слагаемых (не нужны при η = 0)
    """

    M0: float
    rho: float
    lam: float
    t: float = 0.0
    eta: float = 0.0
    stats: Optional[LinkStats] = None
    n0_lambda: Optional[float] = None
    history: List[Tuple[int, float, float]] = field(default_factory=list)

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise ConfigError("ρ должен лежать в (0, 1)", field="schedule.rho")
        if not self.M0 > 0:
            raise ConfigError("M₀ должен быть положительным", field="schedule.M0")
        if self.lam < 0 or self.t < 0 or self.eta < 0:
            raise ConfigError("λ, t и η должны быть неотрицательными", field="schedule")
        if self.eta > 0 and (self.stats is None or self.n0_lambda is None):
            raise ConfigError("При η > 0 нужны статистики связи и n₀(λ)", field="schedule.n0_lambda")

    @property
    def sigma(self) -> float:
        return self.stats.sigma if self.stats is not None else 0.0

    @property
    def gamma(self) -> float:
        return self.stats.gamma if self.stats is not None else 0.0

    def check_hypotheses(self, init_error: float, n: int) -> bool:
        """M₀ >= ||θ₀ - μθ*|| и ρ >= √(n₀(λ)/n); нарушение - предупреждение в лог"""
        ok = True
        if self.M0 < init_error:
            logger.warning(f"M₀ = {self.M0:.4g} меньше начальной ошибки {init_error:.4g}")
            ok = False
        if self.n0_lambda is not None and self.rho < math.sqrt(self.n0_lambda / n):
            logger.warning(
                f"ρ = {self.rho:.4g} меньше √(n₀(λ)/n) = {math.sqrt(self.n0_lambda / n):.4g}"
            )
            ok = False
        return ok


def lambda_schedule_step(M_tau: float, schedule: ProxSchedule, stats: Optional[LinkStats],
                         n: int, n0_lambda: Optional[float], b_n: float) -> Tuple[float, float]:
    """
    Один шаг рекурсии

    λ_τ = ((1 + t/b_n)M_τ + ησ)λ / b_n
    M_{τ+1} = ρM_τ + η(σ√n₀(λ) + γ)/√n
    """
    if not b_n > 0 or not n > 0:
        raise DomainError("Нужны b_n > 0 и n > 0", detail=f"b_n={b_n}, n={n}")
    sigma = stats.sigma if stats is not None else 0.0
    gamma = stats.gamma if stats is not None else 0.0
    eta = schedule.eta
    lam_tau = ((1.0 + schedule.t / b_n) * M_tau + eta * sigma) * schedule.lam / b_n
    noise = eta * (sigma * math.sqrt(n0_lambda or 0.0) + gamma) / math.sqrt(n) if eta else 0.0
    return lam_tau, schedule.rho * M_tau + noise


def proxgd_resampled_solve(source: Iterator[Problem], reg: Regularizer, schedule: ProxSchedule,
                           config: SolverConfig = SolverConfig()) -> SolverTrace:
    """
    θ_{τ+1} = prox_{λ_τ}(θ_τ + α X_τᵀ(y_τ - X_τθ_τ)) со свежим батчем на каждой итерации

    Шаг α = 1/b_n² для размера батча n, λ_τ и M_τ - по рекурсии расписания.
    История (τ, λ_τ, M_τ) сохраняется в schedule.history и в трассе.

    Raises:
        ResourceError: если генератор батчей исчерпан
        DivergenceError: если итерации разошлись
    """
    schedule.history.clear()
    try:
        batch = next(source)
    except StopIteration:
        raise ResourceError("Генератор мини-батчей пуст")

    n = batch.n
    b_n = gamma_mean_norm(n)
    alpha = config.resolve_step(n)
    theta = config.initial(batch.p)
    target = batch.target

    if target is not None:
        schedule.check_hypotheses(float(np.linalg.norm(theta - target)), n)

    logger.debug(
        f"ProxGD (пересэмплирование): n={n}, p={batch.p}, ρ={schedule.rho}, λ={schedule.lam}, "
        f"итераций {config.max_iters}"
    )

    recorder = TraceRecorder("proxgd-resampled", target, batch.X, batch.y, config.record_every, config.timing)
    recorder.record(theta, 0, force=True)

    M_tau = schedule.M0
    for tau in range(config.max_iters):
        if tau > 0:
            try:
                batch = next(source)
            except StopIteration:
                raise ResourceError("Генератор мини-батчей исчерпан", detail=f"итерация {tau}")
        lam_tau, M_next = lambda_schedule_step(M_tau, schedule, schedule.stats, n,
                                               schedule.n0_lambda, b_n)
        schedule.history.append((tau, lam_tau, M_tau))

        gradient_step = theta + alpha * (batch.X.T @ (batch.y - batch.X @ theta))
        theta = reg.prox(gradient_step, lam_tau)
        M_tau = M_next
        recorder.record(theta, tau + 1, force=tau + 1 == config.max_iters, X=batch.X, y=batch.y)

    lam_last, _ = lambda_schedule_step(M_tau, schedule, schedule.stats, n, schedule.n0_lambda, b_n)
    schedule.history.append((config.max_iters, lam_last, M_tau))

    return recorder.finish(theta, schedule=list(schedule.history))


def proxgd_solve(problem: Problem, prox: Optional[ProxOperator] = None, lambda0: float = 1.0,
                 rho: float = 0.95, lambda_min: float = 0.0,
                 config: SolverConfig = SolverConfig()) -> SolverTrace:
    """
    Практическая схема с повторным использованием данных

    θ_{τ+1} = prox_{λ_τ}(θ_τ + α Xᵀ(y - Xθ_τ)), λ_τ = max(λ₀ρ^τ, λ_min).
    prox - любая функция (v, λ) -> v: мягкий порог по умолчанию, допускается
    внешний денойзер.

    Raises:
        DivergenceError: если итерации или выход prox нечисловые
    """
    if lambda0 < 0 or lambda_min < 0:
        raise DomainError("λ₀ и λ_min должны быть неотрицательными",
                          detail=f"λ₀={lambda0}, λ_min={lambda_min}")
    if not 0 < rho <= 1:
        raise ConfigError("ρ должен лежать в (0, 1]", field="solver.rho")
    prox = prox or prox_l1

    X, y = problem.X, problem.y
    alpha = config.resolve_step(problem.n)
    theta = config.initial(problem.p)

    logger.debug(f"ProxGD: n={problem.n}, p={problem.p}, λ₀={lambda0}, ρ={rho}, λ_min={lambda_min}")

    recorder = TraceRecorder("proxgd", problem.target, X, y, config.record_every, config.timing)
    recorder.record(theta, 0, force=True)

    schedule: List[Tuple[int, float, float]] = []
    iteration = 0
    for iteration in range(1, config.max_iters + 1):
        lam_tau = max(lambda0 * rho ** (iteration - 1), lambda_min)
        schedule.append((iteration - 1, lam_tau, math.nan))
        updated = np.asarray(prox(theta + alpha * (X.T @ (y - X @ theta)), lam_tau), dtype=float)
        if updated.shape != theta.shape:
            raise DivergenceError("prox вернул вектор другой размерности", iteration=iteration)
        step = float(np.linalg.norm(updated - theta))
        theta = updated
        if config.stop_tol > 0 and step < config.stop_tol:
            recorder.record(theta, iteration, force=True)
            break
        recorder.record(theta, iteration, force=iteration == config.max_iters)

    logger.debug(f"ProxGD завершен: {iteration} итераций, ошибка {recorder.error(theta):.6e}")
    return recorder.finish(theta, schedule=schedule)
