"""
Функции связи f в модели наблюдений y = f(Xθ*)
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.exceptions import ConfigError, LinkEvaluationError

LINK_KINDS = ("linear", "sign", "quantize", "tanh-scale", "cubic", "custom")


@dataclass(frozen=True)
class Link:
    """
    Поэлементная функция связи

    kind: linear | sign | quantize | tanh-scale | cubic | custom
    levels, clip: параметры квантователя (равномерные уровни-середины на [-clip, clip])
    scale: параметр c для tanh(c·z)
    func: чистая скалярная функция для kind="custom" (векторизуемая numpy)
    """

    kind: str
    levels: Optional[int] = None
    clip: Optional[float] = None
    scale: Optional[float] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind not in LINK_KINDS:
            raise ConfigError(f"Неизвестный вид функции связи: {self.kind}", field="link.kind")
        if self.kind == "quantize":
            if self.levels is None or int(self.levels) < 1:
                raise ConfigError("Квантователю нужен levels >= 1", field="link.levels")
            if self.clip is None or not self.clip > 0:
                raise ConfigError("Квантователю нужен clip > 0", field="link.clip")
        if self.kind == "tanh-scale" and (self.scale is None or not self.scale > 0):
            raise ConfigError("tanh-scale требует scale > 0", field="link.scale")
        if self.kind == "custom" and not callable(self.func):
            raise ConfigError("custom требует вызываемый func", field="link.func")

    # Удобные конструкторы
    @classmethod
    def linear(cls) -> "Link":
        return cls("linear")

    @classmethod
    def sign(cls) -> "Link":
        return cls("sign")

    @classmethod
    def cubic(cls) -> "Link":
        return cls("cubic")

    @classmethod
    def quantize(cls, levels: int, clip: float) -> "Link":
        return cls("quantize", levels=int(levels), clip=float(clip))

    @classmethod
    def tanh_scale(cls, scale: float) -> "Link":
        return cls("tanh-scale", scale=float(scale))

    @classmethod
    def custom(cls, func: Callable[[np.ndarray], np.ndarray], name: str = "custom") -> "Link":
        return cls("custom", func=func, name=name)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return apply_link(self, z)

    @property
    def is_linear(self) -> bool:
        return self.kind == "linear"

    def quantizer_levels(self) -> np.ndarray:
        """Уровни-середины квантователя по возрастанию"""
        step = 2.0 * self.clip / self.levels
        return -self.clip + step * (np.arange(self.levels) + 0.5)

    def quantizer_edges(self) -> np.ndarray:
        """Границы ячеек квантователя, крайние - ±inf (насыщение)"""
        step = 2.0 * self.clip / self.levels
        inner = -self.clip + step * np.arange(1, self.levels)
        return np.concatenate(([-np.inf], inner, [np.inf]))

    def to_dict(self) -> Dict[str, Any]:
        """Представление для конфигурации (custom сериализуется только по имени)"""
        data: Dict[str, Any] = {"kind": self.kind}
        if self.kind == "quantize":
            data.update(levels=self.levels, clip=self.clip)
        elif self.kind == "tanh-scale":
            data["scale"] = self.scale
        elif self.kind == "custom":
            data["name"] = self.name
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], registry: Optional[Dict[str, Callable]] = None) -> "Link":
        """
        Разбор тегированной записи вида {"kind": "quantize", "levels": 16, "clip": 3.0}

        Raises:
            ConfigError: если запись некорректна
        """
        if not isinstance(data, dict) or "kind" not in data:
            raise ConfigError("Функция связи задается объектом с полем kind", field="link")
        kind = data["kind"]
        try:
            if kind == "quantize":
                return cls.quantize(data["levels"], data["clip"])
            if kind == "tanh-scale":
                return cls.tanh_scale(data["scale"])
            if kind == "custom":
                name = data.get("name")
                if not registry or name not in registry:
                    raise ConfigError(f"Пользовательская функция связи не зарегистрирована: {name}",
                                      field="link.name")
                return cls.custom(registry[name], name=name)
        except KeyError as e:
            raise ConfigError(f"Не хватает параметра функции связи: {e.args[0]}",
                              field=f"link.{e.args[0]}")
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Некорректный параметр функции связи: {e}", field="link")
        return cls(kind)


def _quantize(link: Link, z: np.ndarray) -> np.ndarray:
    step = 2.0 * link.clip / link.levels
    idx = np.floor((z + link.clip) / step)
    idx = np.clip(idx, 0, link.levels - 1)
    return -link.clip + step * (idx + 0.5)


def apply_link(link: Link, z: np.ndarray) -> np.ndarray:
    """
    Поэлементное применение функции связи

    sign(0) = +1.

    Raises:
        LinkEvaluationError: если пользовательская функция вернула inf/nan
    """
    z = np.asarray(z, dtype=float)

    if link.kind == "linear":
        return z.copy()
    if link.kind == "sign":
        return np.where(z >= 0, 1.0, -1.0)
    if link.kind == "quantize":
        return _quantize(link, z)
    if link.kind == "tanh-scale":
        return np.tanh(link.scale * z)
    if link.kind == "cubic":
        return z ** 3

    out = np.asarray(link.func(z), dtype=float)
    if out.shape != z.shape:
        raise LinkEvaluationError("Пользовательская функция связи изменила размер массива",
                                  detail=f"{z.shape} -> {out.shape}")
    bad = np.flatnonzero(~np.isfinite(out))
    if bad.size:
        raise LinkEvaluationError(index=int(bad[0]))
    return out
