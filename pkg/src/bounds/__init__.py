"""
Теоретические оценки ошибки и условия на число выборок
"""

from .theory import (
    BoundCurve,
    RateCondition,
    check_rate_condition,
    effective_noise_probability,
    kappa,
    pgd_bound,
    pgd_bound_curve,
    pgd_floor,
    pgd_success_probability,
    prox_bound_curve,
    prox_M_bound,
    prox_success_probability,
    psgd_bound,
    psgd_bound_curve,
    psgd_rate,
    psgd_success_probability,
    restricted_eigs_probability,
)

__all__ = [
    "BoundCurve",
    "RateCondition",
    "check_rate_condition",
    "effective_noise_probability",
    "kappa",
    "pgd_bound",
    "pgd_bound_curve",
    "pgd_floor",
    "pgd_success_probability",
    "prox_bound_curve",
    "prox_M_bound",
    "prox_success_probability",
    "psgd_bound",
    "psgd_bound_curve",
    "psgd_rate",
    "psgd_success_probability",
    "restricted_eigs_probability",
]
