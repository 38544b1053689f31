"""
Утилиты приложения
"""

from .logger import logger, setup_logger
from .stats import RunStatistics

__all__ = [
    "logger",
    "setup_logger",
    "RunStatistics",
]
