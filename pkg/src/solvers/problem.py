"""
Постановка задачи оценивания и параметры решателей
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, Optional

import numpy as np

from src.config import get_settings
from src.config.constants import DEFAULT_MAX_ITERS, DEFAULT_SEED, STEP_RULES, UNIT_NORM_TOL
from src.exceptions import ConfigError, PreconditionError, ResourceError
from src.gaussian import gamma_mean_norm, gaussian_design, make_rng
from src.gaussian.design import DesignMatrix, SeedLike
from src.geometry import Regularizer
from src.links import Link, LinkStats, apply_link, link_stats


@dataclass(frozen=True)
class Problem:
    """
    Экземпляр задачи: X, y и (для синтетических данных) оракул μθ*

    model: "nonlinear" для y = f(Xθ*), "noisy-linear" для y = μXθ* + w
    """

    X: np.ndarray
    y: np.ndarray
    link: Optional[Link] = None
    theta_star: Optional[np.ndarray] = None
    mu: float = 1.0
    model: str = "nonlinear"

    def __post_init__(self):
        X = self.X.entries if isinstance(self.X, DesignMatrix) else np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise PreconditionError("X должна быть матрицей", detail=f"ndim={X.ndim}")
        if y.shape != (X.shape[0],):
            raise PreconditionError("Длина y не совпадает с числом строк X",
                                    detail=f"{y.shape} vs n={X.shape[0]}")
        if self.theta_star is not None:
            theta = np.asarray(self.theta_star, dtype=float)
            if theta.shape != (X.shape[1],):
                raise PreconditionError("Размерность θ* не совпадает с p",
                                        detail=f"{theta.shape} vs p={X.shape[1]}")
            if abs(np.linalg.norm(theta) - 1.0) > UNIT_NORM_TOL:
                raise PreconditionError("θ* должен иметь единичную норму",
                                        detail=f"||θ*|| = {np.linalg.norm(theta):.12g}")
            object.__setattr__(self, "theta_star", theta)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def has_oracle(self) -> bool:
        return self.theta_star is not None

    @property
    def target(self) -> Optional[np.ndarray]:
        """μθ* - точка, к которой сходятся итерации"""
        return None if self.theta_star is None else self.mu * self.theta_star


def sparse_unit_vector(p: int, s: int, rng: np.random.Generator) -> np.ndarray:
    """s-разреженный вектор единичной нормы со случайным носителем и гауссовыми значениями"""
    if not 1 <= s <= p:
        raise PreconditionError("Нужно 1 <= s <= p", detail=f"s={s}, p={p}")
    theta = np.zeros(p)
    support = rng.choice(p, size=s, replace=False)
    values = rng.standard_normal(s)
    while not np.any(values):
        values = rng.standard_normal(s)
    theta[support] = values
    return theta / np.linalg.norm(theta)


def synthetic_problem(p: int, n: int, s: int, link: Link, seed: SeedLike = DEFAULT_SEED,
                      stats: Optional[LinkStats] = None, X: Optional[np.ndarray] = None,
                      theta_star: Optional[np.ndarray] = None) -> Problem:
    """
    Синтетическая задача y = f(Xθ*) с гауссовой X и s-разреженным θ*

    Поток 0 зерна - θ*, поток 1 - X. Переданные X и θ* используются как есть.
    """
    if theta_star is None:
        theta_star = sparse_unit_vector(p, s, make_rng(seed, 0))
    if X is None:
        X = gaussian_design(n, p, make_rng(seed, 1))
    stats = stats or link_stats(link)
    y = apply_link(link, np.asarray(X) @ theta_star)
    return Problem(X=X, y=y, link=link, theta_star=theta_star, mu=stats.mu)


def noisy_linear_problem(X: np.ndarray, theta_star: np.ndarray, mu: float, sigma: float,
                         rng: np.random.Generator) -> Problem:
    """Линейная модель y = μXθ* + w, w ~ N(0, σ²I), с тем же масштабом μ"""
    X = np.asarray(X, dtype=float)
    w = sigma * rng.standard_normal(X.shape[0])
    y = mu * (X @ theta_star) + w
    return Problem(X=X, y=y, link=Link.linear(), theta_star=theta_star, mu=mu, model="noisy-linear")


def resolve_regularizer(reg: Regularizer, problem: Problem) -> Regularizer:
    """
    Оракульная настройка R = R(μθ*), если уровень шара не задан

    Raises:
        ConfigError: если уровень не задан, а оракула нет
    """
    if reg.kind in ("l1-ball", "l2-ball") and reg.radius is None:
        if not problem.has_oracle:
            raise ConfigError("Без оракула θ* радиус регуляризатора нужно задать явно",
                              field="regularizer.R")
        return reg.tuned(problem.target)
    return reg


class ResamplingSource:
    """
    Генератор свежих мини-батчей (X_τ, y_τ) размера n для схемы с пересэмплированием

    Батч τ строится из потока τ + 2 зерна, поэтому последовательность
    не зависит от того, сколько батчей уже прочитано другими потребителями.
    """

    def __init__(self, link: Link, theta_star: np.ndarray, n: int, seed: SeedLike = DEFAULT_SEED,
                 mu: Optional[float] = None, max_batches: Optional[int] = None):
        self.link = link
        self.theta_star = np.asarray(theta_star, dtype=float)
        self.n = int(n)
        self.seed = seed
        self.mu = link_stats(link).mu if mu is None else float(mu)
        self.max_batches = max_batches
        self._drawn = 0

    @property
    def p(self) -> int:
        return self.theta_star.size

    def __iter__(self) -> Iterator[Problem]:
        return self

    def __next__(self) -> Problem:
        if self.max_batches is not None and self._drawn >= self.max_batches:
            raise ResourceError("Генератор мини-батчей исчерпан",
                                detail=f"выдано {self._drawn} из {self.max_batches}")
        X = gaussian_design(self.n, self.p, make_rng(self.seed, self._drawn + 2))
        self._drawn += 1
        y = apply_link(self.link, X @ self.theta_star)
        return Problem(X=X, y=y, link=self.link, theta_star=self.theta_star, mu=self.mu)


@dataclass(frozen=True)
class SolverConfig:
    """
    Параметры итераций

    step_size: None - правило шага из настроек (1/b_n² или 1/n)
    trials: число независимых цепочек PSGD на одной и той же X
    stop_tol: останов по ||θ_{τ+1} - θ_τ|| < stop_tol (0 - выключен)
    record_every: шаг записи в трассу (последняя итерация записывается всегда)
    timing: False - wall_ms пишется нулем для побайтно одинаковых выходов
    """

    max_iters: int = DEFAULT_MAX_ITERS
    step_size: Optional[float] = None
    seed: int = DEFAULT_SEED
    trials: int = 1
    stop_tol: float = 0.0
    theta0: Optional[np.ndarray] = field(default=None, compare=False)
    allow_nonconvex: bool = False
    record_every: int = 1
    timing: bool = True
    step_rule: Optional[str] = None

    def __post_init__(self):
        if self.max_iters < 0:
            raise ConfigError("max_iters должен быть неотрицательным", field="solver.max_iters")
        if self.step_size is not None and not self.step_size > 0:
            raise ConfigError("Шаг должен быть положительным", field="solver.step_size")
        if self.trials < 1:
            raise ConfigError("trials должен быть >= 1", field="solver.trials")
        if self.stop_tol < 0:
            raise ConfigError("stop_tol должен быть неотрицательным", field="solver.stop_tol")
        if self.record_every < 1:
            raise ConfigError("record_every должен быть >= 1", field="solver.record_every")
        if self.step_rule is not None and self.step_rule not in STEP_RULES:
            raise ConfigError(f"step_rule должен быть одним из {STEP_RULES}", field="solver.step_rule")

    def resolve_step(self, n: int) -> float:
        """Шаг α = 1/b_n² (или 1/n при правиле "n")"""
        if self.step_size is not None:
            return float(self.step_size)
        rule = self.step_rule or get_settings().step_rule
        if rule == "n":
            return 1.0 / n
        return 1.0 / gamma_mean_norm(n) ** 2

    def initial(self, p: int) -> np.ndarray:
        if self.theta0 is None:
            return np.zeros(p)
        theta0 = np.asarray(self.theta0, dtype=float)
        if theta0.shape != (p,):
            raise PreconditionError("Размерность θ₀ не совпадает с p", detail=f"{theta0.shape} vs p={p}")
        return theta0.copy()

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop("theta0")
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__ and k != "theta0"}
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Неизвестные параметры решателя: {sorted(unknown)}",
                              field=f"solver.{sorted(unknown)[0]}")
        try:
            return cls(**known)
        except TypeError as e:
            raise ConfigError(f"Некорректные параметры решателя: {e}", field="solver")
