import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from src.config.constants import (
    CONSOLE_LOG_FORMAT,
    LOG_BACKUP_COUNT,
    LOG_DATE_FORMAT,
    LOG_FILENAME,
    LOG_FORMAT,
    LOG_MAX_BYTES,
    LOGGER_NAME,
)


def setup_logger(log_dir: Optional[Path] = None, level: str = "INFO") -> logging.Logger:
    """
    Настройка логгера: консоль и, если задана директория, файл с ротацией

    Args:
        log_dir: директория для лог файла (None - только консоль)
        level: уровень консольного вывода
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)

    # Очистка существующих handlers (если есть)
    logger.handlers.clear()

    # Консоль - только INFO и выше для чистого вывода
    console = logging.StreamHandler()
    console.setLevel(getattr(logging, level.upper(), logging.INFO))
    console.setFormatter(logging.Formatter(CONSOLE_LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
    logger.addHandler(console)

    # Файл - все DEBUG сообщения с ротацией
    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_dir / LOG_FILENAME,
            maxBytes=LOG_MAX_BYTES,
            backupCount=LOG_BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
        logger.addHandler(file_handler)

    # Отключаем propagation чтобы избежать дублирования
    logger.propagate = False

    return logger


# Создание глобального экземпляра логгера
logger = setup_logger()
