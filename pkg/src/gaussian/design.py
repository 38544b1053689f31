"""
Детерминированные генераторы случайных чисел и гауссовы матрицы признаков
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from src.exceptions import DomainError, ResourceError

_SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class RngSeed:
    """64-битное зерно генератора"""

    seed: int

    def __post_init__(self):
        if not 0 <= int(self.seed) < _SEED_LIMIT:
            raise DomainError("Зерно должно быть 64-битным беззнаковым целым", detail=f"seed={self.seed}")

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Генератор для потока stream (независимые потоки на испытание)"""
        return make_rng(self.seed, stream)

    def child(self, stream: int) -> "RngSeed":
        """Производное зерно для вложенного потока"""
        mixed = np.random.SeedSequence([int(self.seed), int(stream)]).generate_state(2, np.uint32)
        return RngSeed(int(mixed[0]) << 32 | int(mixed[1]))


SeedLike = Union[int, RngSeed]


def as_seed(seed: SeedLike) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed))


def make_rng(seed: SeedLike, stream: int = 0) -> np.random.Generator:
    """
    Генератор на основе счетчикового Philox, ключ - пара (seed, stream)

    Один и тот же (seed, stream) дает побитово одинаковую последовательность
    независимо от порядка запуска испытаний.
    """
    value = seed.seed if isinstance(seed, RngSeed) else int(seed)
    if not 0 <= value < _SEED_LIMIT:
        raise DomainError("Зерно должно быть 64-битным беззнаковым целым", detail=f"seed={value}")
    if stream < 0:
        raise DomainError("Номер потока должен быть неотрицательным", detail=f"stream={stream}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([value, int(stream)])))


@dataclass(frozen=True)
class DesignMatrix:
    """Матрица признаков n×p (неизменяемая после создания)"""

    entries: np.ndarray

    def __post_init__(self):
        if self.entries.ndim != 2 or min(self.entries.shape) < 1:
            raise DomainError("Матрица признаков должна быть двумерной с n, p >= 1",
                              detail=f"shape={self.entries.shape}")
        self.entries.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.entries.shape[1]


def gaussian_design(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """Матрица n×p с i.i.d. N(0, 1) элементами из заданного генератора"""
    if n < 1 or p < 1:
        raise DomainError("Размерности матрицы должны быть положительными", detail=f"n={n}, p={p}")
    try:
        return rng.standard_normal((n, p))
    except MemoryError as e:
        raise ResourceError("Не удалось выделить память под матрицу признаков",
                            detail=f"n={n}, p={p}") from e


def sample_design(n: int, p: int, seed: SeedLike) -> DesignMatrix:
    """
    Гауссова матрица признаков, детерминированная по зерну

    Raises:
        DomainError: если n < 1 или p < 1
        ResourceError: если не хватает памяти
    """
    return DesignMatrix(gaussian_design(n, p, make_rng(seed)))
