"""
Конфигурация приложения
"""
from . import constants
from .settings import Settings, get_settings, reset_settings, settings

__all__ = ['Settings', 'get_settings', 'reset_settings', 'settings', 'constants']
