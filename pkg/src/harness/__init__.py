"""
Эксперименты, проверки лемм и запись результатов
"""

from .experiments import (
    bound_domination,
    gather_trials,
    run_experiment,
    run_onebit_vs_linear,
    run_psgd_scaling,
    run_solver,
)
from .lemmas import (
    LemmaCheckReport,
    effective_noise_statistic,
    restricted_eigs_statistic,
    validate_effective_noise,
    validate_restricted_eigs,
)

__all__ = [
    "bound_domination",
    "gather_trials",
    "run_experiment",
    "run_onebit_vs_linear",
    "run_psgd_scaling",
    "run_solver",
    "LemmaCheckReport",
    "effective_noise_statistic",
    "restricted_eigs_statistic",
    "validate_effective_noise",
    "validate_restricted_eigs",
]
