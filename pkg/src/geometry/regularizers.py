"""
Регуляризаторы: проекции на множества уровня и проксимальные операторы
"""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.exceptions import ConfigError, DomainError, UnsupportedError

REGULARIZER_KINDS = ("l1-ball", "sparsity", "l2-ball", "custom")

_ALIASES = {"l1": "l1-ball", "l2": "l2-ball", "l0": "sparsity", "sparse": "sparsity"}


def _finite(v: np.ndarray, name: str = "v") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError(f"Вектор {name} содержит inf/nan")
    return v


def project_l1_ball(v: np.ndarray, R: float) -> np.ndarray:
    """
    Евклидова проекция на шар {x: ||x||_1 <= R}

    Сортировка модулей и порог θ из условий ККТ, O(p log p).
    """
    if R < 0:
        raise DomainError("Радиус шара должен быть неотрицательным", detail=f"R={R}")
    v = _finite(v)
    magnitude = np.abs(v)
    if magnitude.sum() <= R:
        return v.copy()
    if R == 0:
        return np.zeros_like(v)

    u = np.sort(magnitude)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, u.size + 1)
    rho = np.flatnonzero(u - (css - R) / k > 0)[-1]
    threshold = (css[rho] - R) / (rho + 1)
    return np.sign(v) * np.maximum(magnitude - threshold, 0.0)


def project_sparse(v: np.ndarray, s: int) -> np.ndarray:
    """
    Жесткий порог: s наибольших по модулю компонент, остальные обнуляются

    При равенстве модулей выигрывает меньший индекс.
    """
    if s < 1:
        raise DomainError("Уровень разреженности должен быть >= 1", detail=f"s={s}")
    v = _finite(v)
    if s >= v.size:
        return v.copy()
    keep = np.argsort(-np.abs(v), kind="stable")[:s]
    out = np.zeros_like(v)
    out[keep] = v[keep]
    return out


def project_l2_ball(v: np.ndarray, R: float) -> np.ndarray:
    """Евклидова проекция на шар {x: ||x||_2 <= R}"""
    if R < 0:
        raise DomainError("Радиус шара должен быть неотрицательным", detail=f"R={R}")
    v = _finite(v)
    norm = np.linalg.norm(v)
    if norm <= R:
        return v.copy()
    return v * (R / norm)


def prox_l1(v: np.ndarray, lam: float) -> np.ndarray:
    """Мягкий порог sign(v)·max(|v| - λ, 0)"""
    if lam < 0:
        raise DomainError("Параметр prox должен быть неотрицательным", detail=f"lam={lam}")
    v = _finite(v)
    return np.sign(v) * np.maximum(np.abs(v) - lam, 0.0)


def prox_l2(v: np.ndarray, lam: float) -> np.ndarray:
    """Блочный мягкий порог для λ||·||_2"""
    if lam < 0:
        raise DomainError("Параметр prox должен быть неотрицательным", detail=f"lam={lam}")
    v = _finite(v)
    norm = np.linalg.norm(v)
    if norm <= lam:
        return np.zeros_like(v)
    return v * (1.0 - lam / norm)


def prox_l0(v: np.ndarray, lam: float) -> np.ndarray:
    """prox для λ||·||_0: жесткий порог на уровне √(2λ)"""
    if lam < 0:
        raise DomainError("Параметр prox должен быть неотрицательным", detail=f"lam={lam}")
    v = _finite(v)
    return np.where(np.abs(v) > np.sqrt(2.0 * lam), v, 0.0)


@dataclass(frozen=True)
class Regularizer:
    """
    Априорная структура параметра

    kind: l1-ball | sparsity | l2-ball | custom
    radius: уровень R множества {R(θ) <= R} (для шаров)
    s: уровень разреженности (для sparsity)
    """

    kind: str
    radius: Optional[float] = None
    s: Optional[int] = None
    custom_projection: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    custom_prox: Optional[Callable[[np.ndarray, float], np.ndarray]] = field(default=None, compare=False)
    custom_convex: bool = False
    name: Optional[str] = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in REGULARIZER_KINDS:
            raise ConfigError(f"Неизвестный регуляризатор: {self.kind}", field="regularizer.kind")
        object.__setattr__(self, "kind", kind)
        if self.radius is not None and self.radius < 0:
            raise ConfigError("Радиус должен быть неотрицательным", field="regularizer.R")
        if kind == "sparsity" and (self.s is None or int(self.s) < 1):
            raise ConfigError("sparsity требует s >= 1", field="regularizer.s")
        if kind == "custom" and not callable(self.custom_projection):
            raise ConfigError("custom требует функцию проекции", field="regularizer.projection")

    # Удобные конструкторы
    @classmethod
    def l1_ball(cls, radius: Optional[float] = None) -> "Regularizer":
        return cls("l1-ball", radius=radius)

    @classmethod
    def l2_ball(cls, radius: Optional[float] = None) -> "Regularizer":
        return cls("l2-ball", radius=radius)

    @classmethod
    def sparsity(cls, s: int) -> "Regularizer":
        return cls("sparsity", s=int(s))

    @property
    def is_convex(self) -> bool:
        if self.kind == "custom":
            return bool(self.custom_convex)
        return self.kind in ("l1-ball", "l2-ball")

    def value(self, v: np.ndarray) -> float:
        """Значение R(v): ||v||_1, ||v||_0 или ||v||_2"""
        v = np.asarray(v, dtype=float)
        if self.kind == "l1-ball":
            return float(np.abs(v).sum())
        if self.kind == "l2-ball":
            return float(np.linalg.norm(v))
        if self.kind == "sparsity":
            return float(np.count_nonzero(v))
        raise UnsupportedError("Значение пользовательского регуляризатора не определено")

    @property
    def level(self) -> float:
        """Уровень множества ограничений"""
        return float(self.s) if self.kind == "sparsity" else self.radius

    def with_radius(self, radius: float) -> "Regularizer":
        return replace(self, radius=float(radius))

    def tuned(self, target: np.ndarray) -> "Regularizer":
        """Оракульная настройка R = R(μθ*) для шаров; sparsity не меняется"""
        if self.kind in ("l1-ball", "l2-ball"):
            return self.with_radius(self.value(target))
        return self

    def project(self, v: np.ndarray) -> np.ndarray:
        """Евклидова проекция на множество {R(θ) <= R}"""
        if self.kind == "sparsity":
            return project_sparse(v, self.s)
        if self.kind == "custom":
            return np.asarray(self.custom_projection(np.asarray(v, dtype=float)), dtype=float)
        if self.radius is None:
            raise ConfigError("Для проекции нужен радиус R", field="regularizer.R")
        if self.kind == "l1-ball":
            return project_l1_ball(v, self.radius)
        return project_l2_ball(v, self.radius)

    def prox(self, v: np.ndarray, lam: float) -> np.ndarray:
        """prox_λ(v) = argmin ½||v - z||² + λR(z)"""
        if self.kind == "l1-ball":
            return prox_l1(v, lam)
        if self.kind == "l2-ball":
            return prox_l2(v, lam)
        if self.kind == "sparsity":
            return prox_l0(v, lam)
        if self.custom_prox is None:
            raise UnsupportedError("У пользовательского регуляризатора нет prox")
        return np.asarray(self.custom_prox(np.asarray(v, dtype=float), lam), dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind}
        if self.kind == "sparsity":
            data["s"] = self.s
        elif self.radius is not None:
            data["R"] = self.radius
        if self.kind == "custom":
            data["name"] = self.name
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Regularizer":
        """
        Разбор записи {"kind": "l1-ball", "R": 1.0} / {"kind": "sparsity", "s": 10}

        R можно опустить: тогда в оракульном режиме берется R(μθ*).
        """
        if not isinstance(data, dict) or "kind" not in data:
            raise ConfigError("Регуляризатор задается объектом с полем kind", field="regularizer")
        kind = _ALIASES.get(data["kind"], data["kind"])
        if kind == "custom":
            raise ConfigError("Пользовательский регуляризатор нельзя задать в файле",
                              field="regularizer.kind")
        try:
            if kind == "sparsity":
                return cls.sparsity(int(data["s"]))
            radius = data.get("R")
            return cls(kind, radius=None if radius is None else float(radius))
        except KeyError as e:
            raise ConfigError(f"Не хватает параметра регуляризатора: {e.args[0]}",
                              field=f"regularizer.{e.args[0]}")
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Некорректный параметр регуляризатора: {e}", field="regularizer")
