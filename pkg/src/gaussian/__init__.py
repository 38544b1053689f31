"""
Гауссово ядро: b_n, φ⁻¹, генераторы и матрицы признаков
"""

from .design import DesignMatrix, RngSeed, as_seed, gaussian_design, make_rng, sample_design
from .gamma import gamma_mean_norm, log_phi, phi, phi_inverse

__all__ = [
    "DesignMatrix",
    "RngSeed",
    "as_seed",
    "gaussian_design",
    "make_rng",
    "sample_design",
    "gamma_mean_norm",
    "log_phi",
    "phi",
    "phi_inverse",
]
