"""
Конфигурация приложения из переменных окружения
"""
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from dotenv import load_dotenv

from src.config import constants

# Загрузка переменных окружения
load_dotenv()


@dataclass
class Settings:
    """Настройки приложения"""

    # Воспроизводимость
    default_seed: int = constants.DEFAULT_SEED

    # Монте-Карло и сетка λ
    mc_samples: int = constants.MC_SAMPLES
    lambda_grid_size: int = constants.LAMBDA_GRID_SIZE
    lambda_grid_min: float = constants.LAMBDA_GRID_MIN
    lambda_grid_max: float = constants.LAMBDA_GRID_MAX

    # Шаг решателей: "bn" -> 1/b_n², "n" -> 1/n
    step_rule: str = constants.DEFAULT_STEP_RULE

    # Параллельные испытания
    max_workers: int = constants.MAX_WORKERS

    # Пути к данным
    base_dir: Path = field(default_factory=lambda: Path(__file__).parent.parent.parent)
    results_dir: Optional[Path] = None
    logs_dir: Path = field(init=False)

    # Статистика
    stats_report_interval: int = constants.STATS_REPORT_INTERVAL

    # Логирование
    log_level: str = "INFO"
    log_max_bytes: int = constants.LOG_MAX_BYTES
    log_backup_count: int = constants.LOG_BACKUP_COUNT

    def __post_init__(self):
        """Инициализация вычисляемых полей"""
        self.logs_dir = self.base_dir / "data" / "logs"
        if self.results_dir is None:
            self.results_dir = self.base_dir / "data" / "results"
        self.results_dir = Path(self.results_dir)

        # Создание директорий если не существуют
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        self.results_dir.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_env(cls) -> "Settings":
        """
        Создание настроек из переменных окружения

        Raises:
            ValueError: Если переменные не удается разобрать
        """
        try:
            kwargs = dict(
                default_seed=int(os.getenv('DEFAULT_SEED', str(constants.DEFAULT_SEED))),
                mc_samples=int(os.getenv('MC_SAMPLES', str(constants.MC_SAMPLES))),
                lambda_grid_size=int(os.getenv('LAMBDA_GRID_SIZE', str(constants.LAMBDA_GRID_SIZE))),
                lambda_grid_min=float(os.getenv('LAMBDA_GRID_MIN', str(constants.LAMBDA_GRID_MIN))),
                lambda_grid_max=float(os.getenv('LAMBDA_GRID_MAX', str(constants.LAMBDA_GRID_MAX))),
                step_rule=os.getenv('STEP_RULE', constants.DEFAULT_STEP_RULE),
                max_workers=int(os.getenv('MAX_WORKERS', str(constants.MAX_WORKERS))),
                stats_report_interval=int(
                    os.getenv('STATS_REPORT_INTERVAL', str(constants.STATS_REPORT_INTERVAL))
                ),
                log_level=os.getenv('LOG_LEVEL', 'INFO'),
            )
        except ValueError as e:
            raise ValueError(f"Ошибка парсинга переменных окружения: {e}")

        results_dir = os.getenv('RESULTS_DIR')
        if results_dir:
            kwargs['results_dir'] = Path(results_dir)

        return cls(**kwargs)

    def lambda_grid(self):
        """Логарифмическая сетка λ по умолчанию"""
        return np.geomspace(self.lambda_grid_min, self.lambda_grid_max, self.lambda_grid_size)

    def validate(self) -> None:
        """
        Валидация настроек

        Raises:
            ValueError: Если настройки некорректны
        """
        if self.default_seed < 0:
            raise ValueError("DEFAULT_SEED должен быть неотрицательным")

        if self.mc_samples <= 0:
            raise ValueError("MC_SAMPLES должен быть положительным")

        if self.lambda_grid_size < 1:
            raise ValueError("LAMBDA_GRID_SIZE должен быть не меньше 1")

        if not 0 < self.lambda_grid_min <= self.lambda_grid_max:
            raise ValueError("Требуется 0 < LAMBDA_GRID_MIN <= LAMBDA_GRID_MAX")

        if self.step_rule not in constants.STEP_RULES:
            raise ValueError(f"STEP_RULE должен быть одним из {constants.STEP_RULES}")

        if self.max_workers <= 0:
            raise ValueError("MAX_WORKERS должен быть положительным")

    def __repr__(self) -> str:
        return (
            f"Settings("
            f"default_seed={self.default_seed}, "
            f"mc_samples={self.mc_samples}, "
            f"step_rule='{self.step_rule}', "
            f"results_dir={self.results_dir}"
            f")"
        )


# Глобальный экземпляр настроек (ленивая инициализация)
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """
    Получить глобальный экземпляр настроек (singleton)

    Returns:
        Settings: Настройки приложения
    """
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
        _settings.validate()
    return _settings


def reset_settings() -> None:
    """Сбросить глобальный экземпляр настроек (для тестов)"""
    global _settings
    _settings = None


# Для удобства импорта
settings = get_settings
