"""
Итерационные схемы оценивания: PGD, PSGD и проксимальный градиентный спуск
"""

from .pgd import pgd_solve
from .problem import (
    Problem,
    ResamplingSource,
    SolverConfig,
    noisy_linear_problem,
    resolve_regularizer,
    sparse_unit_vector,
    synthetic_problem,
)
from .prox import ProxSchedule, lambda_schedule_step, proxgd_resampled_solve, proxgd_solve
from .psgd import psgd_solve, row_weights, sample_rows
from .trace import SolverTrace, TraceRecord, TraceRecorder

__all__ = [
    "pgd_solve",
    "Problem",
    "ResamplingSource",
    "SolverConfig",
    "noisy_linear_problem",
    "resolve_regularizer",
    "sparse_unit_vector",
    "synthetic_problem",
    "ProxSchedule",
    "lambda_schedule_step",
    "proxgd_resampled_solve",
    "proxgd_solve",
    "psgd_solve",
    "row_weights",
    "sample_rows",
    "SolverTrace",
    "TraceRecord",
    "TraceRecorder",
]
