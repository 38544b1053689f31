"""
Трассы итераций решателей
"""

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.config.constants import DIVERGENCE_FACTOR, PLATEAU_WINDOW
from src.exceptions import DivergenceError


@dataclass(frozen=True)
class TraceRecord:
    """Одна строка трассы: iter, error, residual, wall_ms"""

    iter: int
    error: float
    residual: float
    wall_ms: float

    def as_row(self) -> Tuple[int, float, float, float]:
        return (self.iter, self.error, self.residual, self.wall_ms)


@dataclass
class SolverTrace:
    """
    Результат решателя

    records: записи по итерациям (error = ||θ_τ - μθ*||, nan без оракула)
    trials: трассы отдельных цепочек (PSGD)
    mean_sq_error: средний по цепочкам квадрат ошибки на каждой записи (PSGD)
    schedule: история (τ, λ_τ, M_τ) проксимальной схемы
    """

    solver: str
    records: List[TraceRecord]
    theta_hat: np.ndarray
    trials: List["SolverTrace"] = field(default_factory=list)
    mean_sq_error: Optional[np.ndarray] = None
    schedule: List[Tuple[int, float, float]] = field(default_factory=list)

    @property
    def iterations(self) -> np.ndarray:
        return np.array([r.iter for r in self.records], dtype=int)

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.records], dtype=float)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records], dtype=float)

    @property
    def final_error(self) -> float:
        return self.records[-1].error

    def plateau(self, window: int = PLATEAU_WINDOW) -> float:
        """Средняя ошибка по последним window записям"""
        return float(np.mean(self.errors[-window:]))

    def relative_error(self, target: np.ndarray) -> float:
        """||θ̂ - μθ*|| / ||μθ*||"""
        norm = float(np.linalg.norm(target))
        if norm == 0:
            return math.nan
        return float(np.linalg.norm(self.theta_hat - target)) / norm


class TraceRecorder:
    """
    Накопление записей трассы с контролем расходимости

    Расходимость: нечисловая итерация или (при наличии оракула) ошибка
    больше DIVERGENCE_FACTOR от начальной.
    """

    def __init__(self, solver: str, target: Optional[np.ndarray], X: np.ndarray, y: np.ndarray,
                 record_every: int = 1, timing: bool = True):
        self.solver = solver
        self.target = target
        self.X = X
        self.y = y
        self.record_every = record_every
        self.timing = timing
        self.records: List[TraceRecord] = []
        self._start = time.perf_counter()
        self._reference: Optional[float] = None

    def _wall_ms(self) -> float:
        if not self.timing:
            return 0.0
        return (time.perf_counter() - self._start) * 1000.0

    def error(self, theta: np.ndarray) -> float:
        if self.target is None:
            return math.nan
        return float(np.linalg.norm(theta - self.target))

    def check(self, theta: np.ndarray, iteration: int) -> None:
        if not np.all(np.isfinite(theta)):
            raise DivergenceError("Итерация содержит inf/nan", iteration=iteration)
        value = self.error(theta) if self.target is not None else None
        if value is None:
            return
        if self._reference is None:
            self._reference = value if value > 0 else 1.0
        elif value > DIVERGENCE_FACTOR * self._reference:
            raise DivergenceError(
                "Ошибка превысила порог расходимости", iteration=iteration,
                detail=f"итерация {iteration}: ошибка {value:.3e}",
            )

    def record(self, theta: np.ndarray, iteration: int, force: bool = False,
               X: Optional[np.ndarray] = None, y: Optional[np.ndarray] = None) -> None:
        """Запись итерации (если она попадает в шаг записи или force)"""
        self.check(theta, iteration)
        if not force and iteration % self.record_every != 0:
            return
        if self.records and self.records[-1].iter == iteration:
            return
        X = self.X if X is None else X
        y = self.y if y is None else y
        residual = float(np.linalg.norm(y - X @ theta))
        if not math.isfinite(residual):
            raise DivergenceError("Невязка нечисловая", iteration=iteration)
        self.records.append(TraceRecord(iteration, self.error(theta), residual, self._wall_ms()))

    def finish(self, theta: np.ndarray, **extra) -> SolverTrace:
        return SolverTrace(solver=self.solver, records=self.records, theta_hat=theta, **extra)
