"""
Монте-Карло проверка ограниченных собственных значений гауссовой матрицы
и контроля эффективного шума
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.bounds import effective_noise_probability
from src.exceptions import DomainError
from src.gaussian import gamma_mean_norm, gaussian_design, make_rng
from src.gaussian.design import SeedLike
from src.geometry import Regularizer, cone_norm, minimal_samples, sample_cone_directions
from src.links import Link, LinkStats, apply_link, concentration_probe, link_stats
from src.utils.logger import logger

RESTRICTED_EIGS = "restricted-eigs"
EFFECTIVE_NOISE = "effective-noise"

# Запас над вероятностным бюджетом при проверке эффективного шума
EXCEEDANCE_SLACK = 0.10


@dataclass(frozen=True)
class LemmaCheckReport:
    """
    Итог проверки: passed тогда и только тогда, когда statistic <= bound
    """

    lemma: str
    statistic: float
    bound: float
    passed: bool
    trials: int
    details: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "statistic": self.statistic,
            "bound": self.bound,
            "passed": self.passed,
            "trials": self.trials,
            **self.details,
        }


def restricted_eigs_statistic(X: np.ndarray, directions: np.ndarray) -> float:
    """
    max по парам (u, v) выборочных направлений от |uᵀ(I - XᵀX/b_n²)v|

    Выборочный максимум - нижняя оценка настоящего супремума по конусу.
    """
    b_n = gamma_mean_norm(X.shape[0])
    XU = X @ directions.T
    form = directions @ directions.T - (XU.T @ XU) / (b_n * b_n)
    return float(np.abs(form).max())


def validate_restricted_eigs(reg: Regularizer, theta: np.ndarray, n: int, p: int, t: float = 0.0,
                             trials: int = 200, seed: SeedLike = 0, directions: int = 64,
                             required: float = 0.95, n0: Optional[float] = None) -> LemmaCheckReport:
    """
    Проверка sup uᵀ(I - XᵀX/b_n²)v <= √(8n₀/n) на парах направлений конуса

    statistic - квантиль уровня required по перевыборкам X, то есть
    проверка проходит, если неравенство выполнено в доле перевыборок >= required.
    При n <= n₀ оценка тривиальна (>= √8), результат только сообщается.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size != p:
        raise DomainError("Размерность θ не совпадает с p", detail=f"{theta.size} vs p={p}")
    if trials < 1 or directions < 2:
        raise DomainError("Нужны trials >= 1 и directions >= 2")
    n0 = minimal_samples(reg, theta, t).n0 if n0 is None else float(n0)
    bound = math.sqrt(8.0 * n0 / n)

    values = np.empty(trials)
    for r in range(trials):
        rng = make_rng(seed, r)
        X = gaussian_design(n, p, rng)
        U = sample_cone_directions(theta, directions, rng)
        values[r] = restricted_eigs_statistic(X, U)

    statistic = float(np.quantile(values, required))
    pass_rate = float(np.mean(values <= bound))
    vacuous = bound >= 1.0
    if vacuous:
        logger.info(f"n = {n} <= n₀: оценка √(8n₀/n) = {bound:.3g} тривиальна, только отчет")
    return LemmaCheckReport(
        lemma=RESTRICTED_EIGS,
        statistic=statistic,
        bound=bound,
        passed=statistic <= bound,
        trials=trials,
        details={"n": n, "p": p, "n0": n0, "pass_rate": pass_rate, "required": required,
                 "max": float(values.max()), "vacuous": vacuous},
    )


def effective_noise_statistic(reg: Regularizer, theta: np.ndarray, X: np.ndarray, w: np.ndarray) -> float:
    """||P_C(Xᵀw)|| (для множества s-разреженных векторов - супремум по конусу)"""
    return float(cone_norm(reg, theta, X.T @ w)[0])


def effective_noise_rhs(n: int, n0: float, eta: float, stats: LinkStats) -> float:
    """(b_n²/√n)·η(σ√n₀ + γ)"""
    b_n = gamma_mean_norm(n)
    return b_n * b_n / math.sqrt(n) * eta * (stats.sigma * math.sqrt(n0) + stats.gamma)


def validate_effective_noise(link: Link, reg: Regularizer, theta: np.ndarray, n: int, p: int,
                             eta: float, t: float = 0.0, trials: int = 200, seed: SeedLike = 0,
                             stats: Optional[LinkStats] = None, n0: Optional[float] = None,
                             probe_trials: int = 2000) -> LemmaCheckReport:
    """
    Частота превышения ||P_C(Xᵀw)|| над (b_n²/√n)·η(σ√n₀ + γ)

    Бюджет - p(η) по пробе концентрации плюс e^{-t²/2}; проверка проходит,
    если частота не больше бюджета плюс 0.1.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size != p:
        raise DomainError("Размерность θ не совпадает с p", detail=f"{theta.size} vs p={p}")
    stats = stats or link_stats(link)
    n0 = minimal_samples(reg, theta, t).n0 if n0 is None else float(n0)
    rhs = effective_noise_rhs(n, n0, eta, stats)

    probe = concentration_probe(link, n, eta, probe_trials, make_rng(seed, trials).integers(2 ** 63),
                                stats=stats)
    budget = 1.0 - effective_noise_probability(probe.p_hat, t)

    values = np.empty(trials)
    for r in range(trials):
        X = gaussian_design(n, p, make_rng(seed, r))
        z = X @ theta
        w = apply_link(link, z) - stats.mu * z
        values[r] = effective_noise_statistic(reg, theta, X, w)

    frequency = float(np.mean(values > rhs))
    limit = min(1.0, budget + EXCEEDANCE_SLACK)
    return LemmaCheckReport(
        lemma=EFFECTIVE_NOISE,
        statistic=frequency,
        bound=limit,
        passed=frequency <= limit,
        trials=trials,
        details={"n": n, "p": p, "n0": n0, "eta": eta, "rhs": rhs, "p_eta": probe.p_hat,
                 "mean_statistic": float(values.mean()), "max_statistic": float(values.max())},
    )
