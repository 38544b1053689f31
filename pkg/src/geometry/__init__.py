"""
Регуляризаторы, геометрия конуса спуска и минимальное число выборок
"""

from .cone import (
    polar_level_l1,
    project_descent_set_l1,
    project_tangent_cone_l1,
    sample_cone_directions,
)
from .distance import (
    DescentConeStats,
    GaussianDistance,
    MinimalSamples,
    cone_norm,
    gaussian_distance_sq,
    gaussian_width,
    minimal_samples,
    minimal_samples_regularized,
    minimal_samples_width,
    subgradient_distance_l1,
)
from .regularizers import (
    REGULARIZER_KINDS,
    Regularizer,
    project_l1_ball,
    project_l2_ball,
    project_sparse,
    prox_l0,
    prox_l1,
    prox_l2,
)

__all__ = [
    "polar_level_l1",
    "project_descent_set_l1",
    "project_tangent_cone_l1",
    "sample_cone_directions",
    "DescentConeStats",
    "GaussianDistance",
    "MinimalSamples",
    "cone_norm",
    "gaussian_distance_sq",
    "gaussian_width",
    "minimal_samples",
    "minimal_samples_regularized",
    "minimal_samples_width",
    "subgradient_distance_l1",
    "REGULARIZER_KINDS",
    "Regularizer",
    "project_l1_ball",
    "project_l2_ball",
    "project_sparse",
    "prox_l0",
    "prox_l1",
    "prox_l2",
]
