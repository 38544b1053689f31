"""
Модуль для сбора статистики прогона экспериментов
"""

from datetime import datetime, timedelta
from typing import Dict, Optional

import pytz

from src.config.constants import STATS_REPORT_INTERVAL


class RunStatistics:
    """Счетчики завершенных и упавших испытаний одного прогона"""

    def __init__(self, total_trials: Optional[int] = None, report_interval: int = STATS_REPORT_INTERVAL):
        self.completed: int = 0
        self.failed: int = 0
        self.total_trials = total_trials
        self.report_interval = report_interval
        self.start_time: datetime = datetime.now(pytz.UTC)
        self.finish_time: Optional[datetime] = None

    def increment_completed(self) -> None:
        self.completed += 1

    def increment_failed(self) -> None:
        """Увеличивает счетчик испытаний, завершившихся ошибкой"""
        self.failed += 1

    def finish(self) -> None:
        self.finish_time = datetime.now(pytz.UTC)

    @property
    def processed(self) -> int:
        return self.completed + self.failed

    def should_log_stats(self) -> bool:
        """
        Проверяет, нужно ли логировать прогресс

        Returns:
            bool: True каждые report_interval обработанных испытаний
        """
        return self.processed > 0 and self.processed % self.report_interval == 0

    def get_uptime(self) -> timedelta:
        end = self.finish_time or datetime.now(pytz.UTC)
        return end - self.start_time

    def get_success_rate(self) -> float:
        """
        Процент успешно завершенных испытаний

        Returns:
            float: 0-100
        """
        if self.processed == 0:
            return 0.0
        return self.completed / self.processed * 100

    def format_uptime(self) -> str:
        """
        Форматирует длительность прогона

        Returns:
            str: например "1ч 5м 12с"
        """
        uptime = self.get_uptime()
        hours, remainder = divmod(int(uptime.total_seconds()), 3600)
        minutes, seconds = divmod(remainder, 60)

        parts = []
        if hours > 0:
            parts.append(f"{hours}ч")
        if hours > 0 or minutes > 0:
            parts.append(f"{minutes}м")
        parts.append(f"{seconds}с")
        return " ".join(parts)

    def get_log_stats(self) -> str:
        total = f"/{self.total_trials}" if self.total_trials else ""
        return (
            f"📊 Испытания: ✅{self.completed}{total} ❌{self.failed} "
            f"({self.get_success_rate():.1f}%) за {self.format_uptime()}"
        )

    def to_dict(self, include_timing: bool = True) -> Dict:
        """
        Статистика в виде словаря для summary.json

        Args:
            include_timing: False - без времени, чтобы выход был воспроизводимым
        """
        data = {
            "completed": self.completed,
            "failed": self.failed,
            "total": self.total_trials,
            "success_rate": self.get_success_rate(),
        }
        if include_timing:
            data["started_at"] = self.start_time.isoformat()
            data["finished_at"] = self.finish_time.isoformat() if self.finish_time else None
            data["uptime"] = {
                "formatted": self.format_uptime(),
                "seconds": int(self.get_uptime().total_seconds()),
            }
        return data
