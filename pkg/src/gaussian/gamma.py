"""
Константа b_n = E||g||, g ~ N(0, I_n), и обратная к ней функция φ⁻¹

φ(t) = √2·Γ((t+1)/2)/Γ(t/2) считается в логарифмической шкале: прямое
отношение гамма-функций переполняется уже при t ≈ 340.
"""

import math
import numbers

from scipy.optimize import brentq
from scipy.special import gammaln

from src.config.constants import GAMMA_RATIO_SERIES_MIN, PHI_INVERSE_XTOL
from src.exceptions import DomainError

# Коэффициенты ряда log Γ(x+1/2) - log Γ(x) - ½·log x по нечетным степеням 1/x
_LOG_RATIO_SERIES = (
    (1, -1.0 / 8.0),
    (3, 1.0 / 192.0),
    (5, -1.0 / 640.0),
    (7, 17.0 / 14336.0),
)


def _log_half_gamma_ratio(x: float) -> float:
    """log(Γ(x + 1/2) / Γ(x)) для x > 0"""
    if x < GAMMA_RATIO_SERIES_MIN:
        return float(gammaln(x + 0.5) - gammaln(x))

    # При больших x разность gammaln теряет точность, используем ряд Стирлинга
    inv = 1.0 / x
    tail = sum(coef * inv ** power for power, coef in _LOG_RATIO_SERIES)
    return 0.5 * math.log(x) + tail


def log_phi(t: float) -> float:
    """log φ(t) для вещественного t > 0"""
    if not t > 0:
        raise DomainError("φ определена только для t > 0", detail=f"t={t}")
    return 0.5 * math.log(2.0) + _log_half_gamma_ratio(0.5 * t)


def phi(t: float) -> float:
    """φ(t) = √2·Γ((t+1)/2)/Γ(t/2) ≈ √t для вещественного t > 0"""
    return math.exp(log_phi(t))


def gamma_mean_norm(n: int) -> float:
    """
    Ожидаемая норма стандартного гауссова вектора размерности n

    Args:
        n: размерность, n >= 1

    Returns:
        float: b_n, 0 < b_n < √n

    Raises:
        DomainError: если n < 1 или не целое
    """
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise DomainError("b_n определена только для целых n", detail=f"n={n!r}")
    if n < 1:
        raise DomainError("b_n определена только для n >= 1", detail=f"n={n}")
    return phi(float(n))


def phi_inverse(x: float) -> float:
    """
    Решение уравнения φ(t) = x относительно вещественного t

    Результат не округляется: округление до целого числа выборок
    выполняет вызывающая сторона. При x <= b_1 возвращается 1: меньше
    одного наблюдения не бывает.

    Raises:
        DomainError: если x <= 0
    """
    if not x > 0 or not math.isfinite(x):
        raise DomainError("φ⁻¹ определена только для конечных x > 0", detail=f"x={x}")

    target = math.log(x)

    def residual(t: float) -> float:
        return log_phi(t) - target

    lo = 1.0
    if residual(lo) >= 0:
        return lo
    hi = max(2.0, x * x + 1.0)
    while residual(hi) < 0:
        hi *= 2.0

    return float(brentq(residual, lo, hi, xtol=PHI_INVERSE_XTOL, rtol=1e-15, maxiter=500))
