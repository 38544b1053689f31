"""
Гауссова ширина, гауссово расстояние и минимальное число выборок n₀
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtr

from src.config import get_settings
from src.config.constants import MC_CHUNK
from src.exceptions import DomainError, UnsupportedError
from src.gaussian import gamma_mean_norm, make_rng, phi_inverse
from src.gaussian.design import SeedLike
from src.geometry.cone import project_tangent_cone_l1
from src.geometry.regularizers import Regularizer
from src.utils.logger import logger

SQRT_2 = math.sqrt(2.0)

# Константы 7t + √2 из определения n₀(λ) берутся буквально
REGULARIZED_T_FACTOR = 7.0


def subgradient_distance_l1(g: np.ndarray, theta: np.ndarray, lam: float) -> np.ndarray:
    """
    Точное расстояние dist(g, λ∂||θ||_1)

    На носителе θ остаток g_i - λ·sign(θ_i), вне носителя (|g_i| - λ)₊.
    g может быть матрицей: расстояние считается построчно.
    """
    if lam < 0:
        raise DomainError("λ должна быть неотрицательной", detail=f"lam={lam}")
    g = np.asarray(g, dtype=float)
    theta = np.asarray(theta, dtype=float)
    on = theta != 0

    G = np.atleast_2d(g)
    on_res = G[:, on] - lam * np.sign(theta[on])[None, :]
    off_res = np.maximum(np.abs(G[:, ~on]) - lam, 0.0)
    dist = np.sqrt(np.sum(on_res ** 2, axis=1) + np.sum(off_res ** 2, axis=1))
    return dist if g.ndim == 2 else float(dist[0])


@dataclass(frozen=True)
class GaussianDistance:
    """G(λ)² = E dist²(g, λ∂R(θ))"""

    lam: float
    g_sq: float
    method: str
    std_error: float = 0.0
    samples: Optional[int] = None
    seed: Optional[int] = None

    @property
    def g(self) -> float:
        return math.sqrt(self.g_sq)


def _l1_distance_sq_analytic(theta: np.ndarray, lam: float) -> float:
    p = theta.size
    s = int(np.count_nonzero(theta))
    pdf = math.exp(-0.5 * lam * lam) / math.sqrt(2.0 * math.pi)
    tail = 2.0 * ((1.0 + lam * lam) * float(ndtr(-lam)) - lam * pdf)
    return s * (1.0 + lam * lam) + (p - s) * tail


def _mc_mean(sampler, samples: int, seed: SeedLike, p: int) -> Tuple[float, float]:
    """Среднее и стандартная ошибка функции sampler по гауссовым строкам"""
    rng = make_rng(seed)
    total = total_sq = 0.0
    left = samples
    chunk = max(1, MC_CHUNK * 50 // max(p, 1))
    while left > 0:
        size = min(chunk, left)
        values = sampler(rng.standard_normal((size, p)))
        total += float(np.sum(values))
        total_sq += float(np.sum(values * values))
        left -= size
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / samples)


def _seed_value(seed: SeedLike) -> int:
    return seed.seed if hasattr(seed, "seed") else int(seed)


def gaussian_distance_sq(reg: Regularizer, theta: np.ndarray, lam: float,
                         samples: Optional[int] = None, seed: SeedLike = 0,
                         method: str = "auto") -> GaussianDistance:
    """
    Квадрат гауссова расстояния G(λ)² до масштабированного субдифференциала

    method: auto | analytic-l1 | monte-carlo. Для ℓ1 в режиме auto
    используется точная формула s(1+λ²) + (p-s)·2[(1+λ²)Φ(-λ) - λφ(λ)].

    Raises:
        DomainError: если λ < 0
        UnsupportedError: если для регуляризатора нет оракула расстояния
    """
    if lam < 0:
        raise DomainError("λ должна быть неотрицательной", detail=f"lam={lam}")
    theta = np.asarray(theta, dtype=float)
    p = theta.size

    if lam == 0:
        # dist(g, {0})² = ||g||², E = p
        return GaussianDistance(lam=0.0, g_sq=float(p), method="analytic")

    if reg.kind == "l1-ball":
        if method in ("auto", "analytic-l1"):
            return GaussianDistance(lam=lam, g_sq=_l1_distance_sq_analytic(theta, lam),
                                    method="analytic-l1")
        samples = samples or get_settings().mc_samples
        mean, se = _mc_mean(lambda G: subgradient_distance_l1(G, theta, lam) ** 2, samples, seed, p)
        return GaussianDistance(lam=lam, g_sq=mean, method="monte-carlo", std_error=se,
                                samples=samples, seed=_seed_value(seed))

    if reg.kind == "l2-ball":
        norm = float(np.linalg.norm(theta))
        if norm > 0 and method != "monte-carlo":
            return GaussianDistance(lam=lam, g_sq=p + lam * lam, method="analytic")
        samples = samples or get_settings().mc_samples
        if norm > 0:
            u = theta / norm
            sampler = lambda G: np.sum((G - lam * u[None, :]) ** 2, axis=1)
        else:
            sampler = lambda G: np.maximum(np.linalg.norm(G, axis=1) - lam, 0.0) ** 2
        mean, se = _mc_mean(sampler, samples, seed, p)
        return GaussianDistance(lam=lam, g_sq=mean, method="monte-carlo", std_error=se,
                                samples=samples, seed=_seed_value(seed))

    raise UnsupportedError(f"Нет оракула расстояния до субдифференциала для '{reg.kind}'")


@dataclass(frozen=True)
class DescentConeStats:
    """Гауссова ширина ω(C ∩ B^p) конуса спуска"""

    width: float
    std_error: float
    method: str
    lam: Optional[float] = None


def _is_full_space(reg: Regularizer, theta: np.ndarray) -> bool:
    """Конус спуска - все R^p: θ = 0 или θ строго внутри шара"""
    if not np.any(theta):
        return True
    if reg.kind in ("l1-ball", "l2-ball") and reg.radius is not None:
        return reg.value(theta) < reg.radius * (1.0 - 1e-9)
    return False


def cone_norm(reg: Regularizer, theta: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """
    sup ⟨z, u⟩ по единичным u из касательного конуса в θ, построчно для Z

    Для выпуклых конусов это ||P_C(z)||, для множества s-разреженных
    векторов - sqrt(||z_S||² + сумма s наибольших z_i² вне носителя).

    Raises:
        UnsupportedError: для пользовательских регуляризаторов
    """
    theta = np.asarray(theta, dtype=float)
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if reg.kind == "l1-ball":
        return np.linalg.norm(project_tangent_cone_l1(Z, theta), axis=1)
    if reg.kind == "l2-ball":
        u = theta / np.linalg.norm(theta)
        return np.linalg.norm(Z - np.maximum(Z @ u, 0.0)[:, None] * u[None, :], axis=1)
    if reg.kind == "sparsity":
        on = theta != 0
        off_sq = np.sort(Z[:, ~on] ** 2, axis=1)[:, ::-1][:, :int(reg.s)]
        return np.sqrt(np.sum(Z[:, on] ** 2, axis=1) + np.sum(off_sq, axis=1))
    raise UnsupportedError(f"Нет оценки ширины для '{reg.kind}'")


def gaussian_width(reg: Regularizer, theta: np.ndarray, samples: Optional[int] = None,
                   seed: SeedLike = 0, method: str = "monte-carlo",
                   lambda_grid: Optional[Sequence[float]] = None) -> DescentConeStats:
    """
    Гауссова ширина касательного конуса в θ

    monte-carlo: E||P_C(g)|| для выпуклых конусов, для множества s-разреженных
    векторов - E sqrt(||g_S||² + сумма s наибольших g_i² вне носителя).
    analytic-l1: min_λ G(λ) по сетке.
    """
    theta = np.asarray(theta, dtype=float)
    p = theta.size

    if _is_full_space(reg, theta):
        return DescentConeStats(width=gamma_mean_norm(p), std_error=0.0, method="full-space")

    if method == "analytic-l1":
        if reg.kind != "l1-ball":
            raise UnsupportedError("analytic-l1 применим только к ℓ1")
        grid = _grid(lambda_grid)
        values = [gaussian_distance_sq(reg, theta, lam).g_sq for lam in grid]
        best = int(np.argmin(values))
        return DescentConeStats(width=math.sqrt(values[best]), std_error=0.0,
                                method="analytic-l1", lam=float(grid[best]))

    samples = samples or get_settings().mc_samples
    mean, se = _mc_mean(lambda G: cone_norm(reg, theta, G), samples, seed, p)
    return DescentConeStats(width=mean, std_error=se, method="monte-carlo")


@dataclass(frozen=True)
class MinimalSamples:
    """Минимальное число выборок n₀ (вещественное, без округления)"""

    n0: float
    t: float
    lam: Optional[float] = None
    method: str = "analytic-l1"
    full_space: bool = False
    grid: Optional[Tuple[float, ...]] = field(default=None, compare=False)
    width: Optional[float] = None

    @property
    def n0_ceil(self) -> int:
        return int(math.ceil(self.n0))

    def to_dict(self) -> dict:
        data = {
            "n0": self.n0,
            "n0_ceil": self.n0_ceil,
            "t": self.t,
            "lambda": self.lam,
            "method": self.method,
            "full_space": self.full_space,
            "width": self.width,
        }
        if self.grid is not None:
            data["grid"] = {"size": len(self.grid), "min": min(self.grid), "max": max(self.grid)}
        return data


def _grid(lambda_grid: Optional[Sequence[float]]) -> np.ndarray:
    grid = get_settings().lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("Сетка λ пуста")
    if np.any(grid < 0):
        raise DomainError("Сетка λ должна быть неотрицательной")
    return grid


def minimal_samples_regularized(reg: Regularizer, theta: np.ndarray, lam: float, t: float = 0.0,
                                samples: Optional[int] = None, seed: SeedLike = 0) -> MinimalSamples:
    """n₀(λ) = φ⁻¹(G(λ) + 7t + √2)"""
    if t < 0:
        raise DomainError("t должен быть неотрицательным", detail=f"t={t}")
    distance = gaussian_distance_sq(reg, theta, lam, samples=samples, seed=seed)
    n0 = phi_inverse(distance.g + REGULARIZED_T_FACTOR * t + SQRT_2)
    return MinimalSamples(n0=n0, t=t, lam=lam, method=distance.method, width=distance.g)


def minimal_samples_width(reg: Regularizer, theta: np.ndarray, t: float = 0.0,
                          samples: Optional[int] = None, seed: SeedLike = 0) -> MinimalSamples:
    """n₀ = φ⁻¹(ω + t) с шириной, оцененной Монте-Карло"""
    if t < 0:
        raise DomainError("t должен быть неотрицательным", detail=f"t={t}")
    stats = gaussian_width(reg, theta, samples=samples, seed=seed)
    return MinimalSamples(n0=phi_inverse(stats.width + t), t=t, method=stats.method,
                          full_space=stats.method == "full-space", width=stats.width)


def minimal_samples(reg: Regularizer, theta: np.ndarray, t: float = 0.0,
                    lambda_grid: Optional[Sequence[float]] = None,
                    samples: Optional[int] = None, seed: SeedLike = 0) -> MinimalSamples:
    """
    n₀ ≈ min_λ n₀(λ) по сетке λ

    Если конус спуска - все R^p (θ = 0 или θ внутри шара), n₀ = φ⁻¹(b_p + t),
    то есть p при t = 0. Для множества s-разреженных векторов (субдифференциала
    нет) используется φ⁻¹(ω + t) с шириной Монте-Карло.

    Raises:
        DomainError: если сетка λ пуста или t < 0
    """
    if t < 0:
        raise DomainError("t должен быть неотрицательным", detail=f"t={t}")
    theta = np.asarray(theta, dtype=float)
    grid = _grid(lambda_grid)
    p = theta.size

    if _is_full_space(reg, theta):
        if not np.any(theta):
            logger.warning("θ = 0: конус спуска совпадает с R^p, n₀ ≈ p")
        width = gamma_mean_norm(p)
        return MinimalSamples(n0=phi_inverse(width + t), t=t, method="full-space",
                              full_space=True, width=width)

    if reg.kind == "sparsity":
        return minimal_samples_width(reg, theta, t, samples=samples, seed=seed)

    candidates = [minimal_samples_regularized(reg, theta, float(lam), t, samples=samples, seed=seed)
                  for lam in grid]
    best = min(candidates, key=lambda item: item.n0)
    return MinimalSamples(n0=best.n0, t=t, lam=best.lam, method=best.method,
                          grid=tuple(float(x) for x in grid), width=best.width)
