"""
JSON конфигурация эксперимента
"""

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.config.constants import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EXPERIMENT_KINDS,
    PSGD_ITERS_PER_DIM,
    SOLVER_NAMES,
)
from src.exceptions import ConfigError
from src.geometry import Regularizer
from src.links import Link
from src.solvers import SolverConfig

# Параметры проксимальных схем, которые не входят в SolverConfig
PROX_OPTIONS = ("lambda0", "rho", "lambda_min", "M0", "lam")

TOP_LEVEL_FIELDS = (
    "kind", "p", "n", "s", "p_list", "link", "regularizer", "solver",
    "trials", "seed", "out", "eta", "t", "iters_per_dim", "timing",
)


def _line_of(text: Optional[str], key: str) -> Optional[int]:
    """Номер строки первого вхождения ключа "key" в исходном тексте"""
    if not text:
        return None
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Описание эксперимента

    onebit-vs-linear: p, n, s (по умолчанию s = p/50, n = p/2)
    psgd-scaling: p_list, n = 4p, s = 0.1p, iters_per_dim итераций PSGD на размерность
    """

    kind: str = "onebit-vs-linear"
    p: int = 500
    n: Optional[int] = None
    s: Optional[int] = None
    p_list: List[int] = field(default_factory=lambda: [50, 100, 200])
    link: Link = field(default_factory=Link.sign)
    regularizer: Regularizer = field(default_factory=Regularizer.l1_ball)
    solver: str = "pgd"
    solver_config: SolverConfig = field(default_factory=SolverConfig)
    solver_options: Dict[str, float] = field(default_factory=dict)
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    out: Optional[Path] = None
    eta: float = 1.0
    t: float = 0.0
    iters_per_dim: int = PSGD_ITERS_PER_DIM
    timing: bool = True

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"Неизвестный вид эксперимента: {self.kind}", field="kind")
        if self.solver not in SOLVER_NAMES:
            raise ConfigError(f"Неизвестный решатель: {self.solver}", field="solver.name")
        if self.p < 1:
            raise ConfigError("p должен быть >= 1", field="p")
        if self.n is not None and self.n < 1:
            raise ConfigError("n должен быть >= 1", field="n")
        if self.s is not None and not 1 <= self.s <= self.p:
            raise ConfigError("Нужно 1 <= s <= p", field="s")
        if not self.p_list or any(int(p) < 1 for p in self.p_list):
            raise ConfigError("p_list должен содержать положительные размерности", field="p_list")
        if self.trials < 1:
            raise ConfigError("trials должен быть >= 1", field="trials")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed должен быть 64-битным беззнаковым целым", field="seed")
        if not self.eta > 0:
            raise ConfigError("eta должен быть положительным", field="eta")
        if self.t < 0:
            raise ConfigError("t должен быть неотрицательным", field="t")
        if self.iters_per_dim < 1:
            raise ConfigError("iters_per_dim должен быть >= 1", field="iters_per_dim")
        unknown = set(self.solver_options) - set(PROX_OPTIONS)
        if unknown:
            raise ConfigError(f"Неизвестные параметры решателя: {sorted(unknown)}",
                              field=f"solver.{sorted(unknown)[0]}")

    # Размеры с учетом значений по умолчанию
    @property
    def sparsity(self) -> int:
        return self.s if self.s is not None else max(1, self.p // 50)

    @property
    def samples(self) -> int:
        return self.n if self.n is not None else max(1, self.p // 2)

    def dims_for(self, p: int) -> Dict[str, int]:
        """(n, s) для масштабирования PSGD: n = 4p, s = 0.1p"""
        return {"p": p, "n": 4 * p, "s": max(1, int(round(0.1 * p)))}

    @property
    def output_dir(self) -> Path:
        if self.out is not None:
            return Path(self.out)
        from src.config import get_settings
        return get_settings().results_dir / self.kind

    def with_overrides(self, seed: Optional[int] = None, out: Optional[Union[str, Path]] = None,
                       trials: Optional[int] = None) -> "ExperimentConfig":
        """Переопределение полей флагами командной строки"""
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = int(seed)
        if out is not None:
            changes["out"] = Path(out)
        if trials is not None:
            changes["trials"] = int(trials)
        return replace(self, **changes) if changes else self

    def to_dict(self) -> Dict[str, Any]:
        solver = {"name": self.solver, **self.solver_config.to_dict(), **self.solver_options}
        return {
            "kind": self.kind,
            "p": self.p,
            "n": self.n,
            "s": self.s,
            "p_list": list(self.p_list),
            "link": self.link.to_dict(),
            "regularizer": self.regularizer.to_dict(),
            "solver": solver,
            "trials": self.trials,
            "seed": self.seed,
            "out": None if self.out is None else str(self.out),
            "eta": self.eta,
            "t": self.t,
            "iters_per_dim": self.iters_per_dim,
            "timing": self.timing,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], text: Optional[str] = None,
                  registry: Optional[Dict] = None) -> "ExperimentConfig":
        """
        Разбор словаря конфигурации

        Raises:
            ConfigError: с номером строки (если известен текст) и путем поля
        """
        if not isinstance(data, dict):
            raise ConfigError("Конфигурация должна быть JSON объектом", line=1)

        unknown = [key for key in data if key not in TOP_LEVEL_FIELDS]
        if unknown:
            raise ConfigError(f"Неизвестное поле конфигурации: {unknown[0]}",
                              line=_line_of(text, unknown[0]), field=unknown[0])

        current = "config"
        try:
            kwargs: Dict[str, Any] = {}
            if "kind" in data:
                current = "kind"
                kwargs["kind"] = str(data["kind"])
            for key in ("p", "n", "s", "trials", "seed", "iters_per_dim"):
                if data.get(key) is not None:
                    current = key
                    kwargs[key] = _as_int(data[key], key)
            for key in ("eta", "t"):
                if data.get(key) is not None:
                    current = key
                    kwargs[key] = float(data[key])
            if "p_list" in data:
                current = "p_list"
                kwargs["p_list"] = [_as_int(p, "p_list") for p in data["p_list"]]
            if "timing" in data:
                current = "timing"
                kwargs["timing"] = bool(data["timing"])
            if data.get("out") is not None:
                current = "out"
                kwargs["out"] = Path(data["out"])
            if "link" in data:
                current = "link"
                kwargs["link"] = Link.from_dict(data["link"], registry=registry)
            if "regularizer" in data:
                current = "regularizer"
                kwargs["regularizer"] = Regularizer.from_dict(data["regularizer"])
            if "solver" in data:
                current = "solver"
                kwargs.update(_parse_solver(data["solver"]))
            return cls(**kwargs)
        except ConfigError as e:
            top = (e.field or current).split(".")[0]
            if e.line is None and text is not None:
                raise ConfigError(e.message, line=_line_of(text, top), field=e.field or current,
                                  detail=_detail(_line_of(text, top), e.field or current)) from e
            raise
        except (TypeError, ValueError) as e:
            line = _line_of(text, current)
            raise ConfigError(f"Некорректное значение: {e}", line=line, field=current,
                              detail=_detail(line, current)) from e

    @classmethod
    def loads(cls, text: str, registry: Optional[Dict] = None) -> "ExperimentConfig":
        """
        Разбор JSON текста

        Raises:
            ConfigError: синтаксическая ошибка (строка/колонка) или ошибка поля
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Ошибка разбора JSON: {e.msg}", line=e.lineno,
                              detail=f"строка {e.lineno}, колонка {e.colno}") from e
        return cls.from_dict(data, text=text, registry=registry)

    @classmethod
    def load(cls, path: Union[str, Path], registry: Optional[Dict] = None) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Не удалось прочитать конфигурацию: {path}", detail=str(e)) from e
        return cls.loads(text, registry=registry)


def _detail(line: Optional[int], field_path: str) -> str:
    if line is None:
        return f"поле '{field_path}'"
    return f"строка {line}, поле '{field_path}'"


def _as_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"Поле {name} должно быть целым", field=name)
    return int(value)


def _parse_solver(data: Any) -> Dict[str, Any]:
    if isinstance(data, str):
        return {"solver": data}
    if not isinstance(data, dict):
        raise ConfigError("solver задается строкой или объектом", field="solver")
    data = dict(data)
    name = data.pop("name", "pgd")
    options = {key: float(data.pop(key)) for key in PROX_OPTIONS if key in data}
    return {
        "solver": name,
        "solver_config": SolverConfig.from_dict(data),
        "solver_options": options,
    }
