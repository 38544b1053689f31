"""
Теоретические оценки ошибки для PGD, PSGD и рекурсии M_τ проксимальной схемы
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from src.exceptions import BoundUndefinedError, DomainError
from src.geometry import Regularizer
from src.utils.logger import logger


def kappa(reg: Regularizer) -> int:
    """κ_R: 1 для выпуклых регуляризаторов, 2 для невыпуклых"""
    return 1 if reg.is_convex else 2


class RateCondition(NamedTuple):
    """Условие n >= 8κ²n₀, запас n/(8κ²n₀) и скорость √(8κ²n₀/n)"""

    ok: bool
    margin: float
    rate: float


def _positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"{name} должен быть положительным", detail=f"{name}={value}")


def check_rate_condition(n: float, n0: float, kappa: int) -> RateCondition:
    _positive(n=n, n0=n0)
    scale = 8.0 * kappa * kappa * n0
    return RateCondition(ok=n >= scale, margin=n / scale, rate=math.sqrt(scale / n))


def pgd_floor(n: float, n0: float, kappa: int, eta: float, sigma: float, gamma: float) -> float:
    """Шумовое слагаемое κ/(1 - rate) · η(σ√n₀ + γ)/√n"""
    condition = check_rate_condition(n, n0, kappa)
    if condition.rate >= 1:
        raise BoundUndefinedError("Скорость √(8κ²n₀/n) >= 1, оценка PGD не определена",
                                  detail=f"rate={condition.rate:.4g}")
    return kappa / (1.0 - condition.rate) * eta * (sigma * math.sqrt(n0) + gamma) / math.sqrt(n)


def pgd_bound(tau: int, n: float, n0: float, kappa: int, eta: float, sigma: float,
              gamma: float, init_error: float) -> float:
    """
    rate^τ·||θ₀ - μθ*|| + κ/(1 - rate) · η(σ√n₀ + γ)/√n, rate = √(8κ²n₀/n)

    Raises:
        BoundUndefinedError: если rate >= 1
    """
    floor = pgd_floor(n, n0, kappa, eta, sigma, gamma)
    rate = check_rate_condition(n, n0, kappa).rate
    return rate ** tau * init_error + floor


def psgd_rate(n: float, n0: float, p: int) -> float:
    """Геометрический множитель 1 - (1 - √(n₀/n))²/(2p)"""
    return 1.0 - (1.0 - math.sqrt(n0 / n)) ** 2 / (2.0 * p)


def psgd_bound(tau: int, n: float, n0: float, p: int, eta: float, sigma: float,
               init_error_sq: float) -> float:
    """
    Оценка среднего квадрата ошибки PSGD

    (1 - (1 - √(n₀/n))²/(2p))^τ·||θ₀ - μθ*||² + 1.01/(1 - √(n₀/n))² · η²σ²

    Raises:
        BoundUndefinedError: если n <= n₀
    """
    _positive(n=n, n0=n0)
    if n <= n0:
        raise BoundUndefinedError("Оценка PSGD требует n > n₀", detail=f"n={n}, n0={n0}")
    floor = 1.01 / (1.0 - math.sqrt(n0 / n)) ** 2 * eta * eta * sigma * sigma
    return psgd_rate(n, n0, p) ** tau * init_error_sq + floor


def prox_M_bound(tau: int, M0: float, rho: float, eta: float, sigma: float, gamma: float,
                 n: float, n0_lambda: float, geometric_sum: bool = False) -> float:
    """
    Оценка M_τ <= ρ^τM₀ + η(σ√n₀(λ) + γ)/√n

    geometric_sum=True - точная сумма рекурсии ρ^τM₀ + floor·(1 - ρ^τ)/(1 - ρ).
    """
    if not 0 < rho < 1:
        raise DomainError("ρ должен лежать в (0, 1)", detail=f"rho={rho}")
    floor = eta * (sigma * math.sqrt(n0_lambda) + gamma) / math.sqrt(n)
    decay = rho ** tau
    if geometric_sum:
        return decay * M0 + floor * (1.0 - decay) / (1.0 - rho)
    return decay * M0 + floor


def pgd_success_probability(p_eta: float, t: float) -> float:
    """1 - p(η) - 10e^{-t²/8}, с отсечкой в 0"""
    return max(0.0, 1.0 - p_eta - 10.0 * math.exp(-t * t / 8.0))


def psgd_success_probability(p_eta: float, n: int, p: int, c: float) -> float:
    """1 - (n + 1)e^{-cp} - p(η); c - абсолютная константа, задается явно"""
    return max(0.0, 1.0 - (n + 1) * math.exp(-c * p) - p_eta)


def prox_success_probability(tau: int, p_eta: float, t: float) -> float:
    """1 - τ(2p(η) + 7e^{-t²/2}); для больших τ становится нулевой"""
    return max(0.0, 1.0 - tau * (2.0 * p_eta + 7.0 * math.exp(-t * t / 2.0)))


def restricted_eigs_probability(t: float) -> float:
    return max(0.0, 1.0 - 9.0 * math.exp(-t * t / 8.0))


def effective_noise_probability(p_eta: float, t: float) -> float:
    return max(0.0, 1.0 - p_eta - math.exp(-t * t / 2.0))


@dataclass
class BoundCurve:
    """
    Значения оценки по итерациям и снимок входных параметров

    valid=False: условие теоремы не выполнено, values содержит только
    геометрическое слагаемое для диагностики.
    """

    kind: str
    values: np.ndarray
    inputs: Dict[str, float] = field(default_factory=dict)
    valid: bool = True
    rate: float = math.nan

    def rows(self) -> List[Tuple[int, float]]:
        return [(tau, float(value)) for tau, value in enumerate(self.values)]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "valid": self.valid, "rate": self.rate, "inputs": dict(self.inputs)}


def pgd_bound_curve(iters: int, n: float, n0: float, kappa: int, eta: float, sigma: float,
                    gamma: float, init_error: float) -> BoundCurve:
    inputs = dict(kappa=kappa, n=n, n0=n0, eta=eta, sigma=sigma, gamma=gamma, init_error=init_error)
    condition = check_rate_condition(n, n0, kappa)
    taus = np.arange(iters + 1)
    geometric = condition.rate ** taus * init_error
    if condition.rate >= 1:
        logger.warning(
            f"Оценка PGD не определена: √(8κ²n₀/n) = {condition.rate:.4g} >= 1, кривая помечена невалидной"
        )
        return BoundCurve("pgd", geometric, inputs, valid=False, rate=condition.rate)
    if not condition.ok:
        logger.warning(f"n < 8κ²n₀ (запас {condition.margin:.3g}): условие теоремы не выполнено")
    floor = pgd_floor(n, n0, kappa, eta, sigma, gamma)
    return BoundCurve("pgd", geometric + floor, inputs, valid=condition.ok, rate=condition.rate)


def psgd_bound_curve(iters: int, n: float, n0: float, p: int, eta: float, sigma: float,
                     init_error_sq: float, record_every: int = 1) -> BoundCurve:
    """Кривая для среднего квадрата ошибки в точках τ = 0, k, 2k, ... (k = record_every)"""
    inputs = dict(n=n, n0=n0, p=p, eta=eta, sigma=sigma, init_error_sq=init_error_sq)
    taus = np.arange(0, iters + 1, record_every)
    if n <= n0:
        logger.warning(f"Оценка PSGD не определена: n = {n} <= n₀ = {n0:.4g}")
        return BoundCurve("psgd", np.full(taus.size, init_error_sq), inputs, valid=False)
    rate = psgd_rate(n, n0, p)
    values = np.array([psgd_bound(int(tau), n, n0, p, eta, sigma, init_error_sq) for tau in taus])
    return BoundCurve("psgd", values, inputs, valid=True, rate=rate)


def prox_bound_curve(iters: int, M0: float, rho: float, eta: float, sigma: float, gamma: float,
                     n: float, n0_lambda: float, geometric_sum: bool = True) -> BoundCurve:
    inputs = dict(M0=M0, rho=rho, eta=eta, sigma=sigma, gamma=gamma, n=n, n0_lambda=n0_lambda)
    values = np.array([
        prox_M_bound(tau, M0, rho, eta, sigma, gamma, n, n0_lambda, geometric_sum=geometric_sum)
        for tau in range(iters + 1)
    ])
    return BoundCurve("prox-M", values, inputs, valid=True, rate=rho)
