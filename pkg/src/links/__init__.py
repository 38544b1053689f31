"""
Функции связи и параметры нелинейности
"""

from .link import LINK_KINDS, Link, apply_link
from .stats import (
    ConcentrationEstimate,
    EffectiveNoise,
    LinkStats,
    check_unit_norm,
    concentration_probe,
    effective_noise,
    link_stats,
    link_stats_analytic,
    link_stats_mc,
)

__all__ = [
    "LINK_KINDS",
    "Link",
    "apply_link",
    "ConcentrationEstimate",
    "EffectiveNoise",
    "LinkStats",
    "check_unit_norm",
    "concentration_probe",
    "effective_noise",
    "link_stats",
    "link_stats_analytic",
    "link_stats_mc",
]
