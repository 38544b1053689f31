"""
Параметры нелинейности (μ, σ², γ²), эффективный шум и вероятность концентрации
"""

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy.special import ndtr

from src.config.constants import (
    MC_CHUNK,
    MIN_LINK_MC_SAMPLES,
    PROBE_CHUNK_TRIALS,
    SIGN_VARIANCE,
    SQRT_2_OVER_PI,
    UNIT_NORM_TOL,
)
from src.exceptions import (
    DomainError,
    LinkEvaluationError,
    PreconditionError,
    UnsupportedError,
)
from src.gaussian import gamma_mean_norm, make_rng
from src.gaussian.design import DesignMatrix, SeedLike
from src.links.link import Link, apply_link
from src.utils.logger import logger

ANALYTIC_KINDS = ("linear", "sign", "cubic", "quantize")


@dataclass(frozen=True)
class LinkStats:
    """Тройка параметров нелинейности и ее происхождение"""

    mu: float
    sigma_sq: float
    gamma_sq: float
    source: str = "analytic"
    samples: Optional[int] = None
    seed: Optional[int] = None
    mu_se: float = 0.0
    sigma_sq_se: float = 0.0
    gamma_sq_se: float = 0.0

    def __post_init__(self):
        if self.sigma_sq < 0 or self.gamma_sq < 0:
            raise DomainError("σ² и γ² должны быть неотрицательными",
                              detail=f"σ²={self.sigma_sq}, γ²={self.gamma_sq}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_sq)

    @property
    def gamma(self) -> float:
        return math.sqrt(self.gamma_sq)

    def to_dict(self) -> dict:
        data = {
            "mu": self.mu,
            "sigma_sq": self.sigma_sq,
            "gamma_sq": self.gamma_sq,
            "source": self.source,
        }
        if self.source == "monte-carlo":
            data.update(
                samples=self.samples,
                seed=self.seed,
                mu_se=self.mu_se,
                sigma_sq_se=self.sigma_sq_se,
                gamma_sq_se=self.gamma_sq_se,
            )
        return data


def _pdf(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _times_pdf(x: np.ndarray, poly) -> np.ndarray:
    """poly(x)·pdf(x) с нулем на бесконечных концах"""
    finite = np.isfinite(x)
    safe = np.where(finite, x, 0.0)
    return np.where(finite, poly(safe) * _pdf(safe), 0.0)


def _quantize_stats(link: Link) -> LinkStats:
    """Точные моменты квантователя через усеченные гауссовы интегралы"""
    levels = link.quantizer_levels()
    edges = link.quantizer_edges()
    a, b = edges[:-1], edges[1:]

    mass = ndtr(b) - ndtr(a)
    # ∫ g φ = φ(a) - φ(b);  ∫ g² φ = Φ - gφ;  ∫ g³ φ = -(g² + 2)φ
    m1 = _times_pdf(a, lambda x: 1.0) - _times_pdf(b, lambda x: 1.0)
    m2 = mass - (_times_pdf(b, lambda x: x) - _times_pdf(a, lambda x: x))
    m3 = _times_pdf(a, lambda x: x * x + 2.0) - _times_pdf(b, lambda x: x * x + 2.0)

    mu = float(np.sum(levels * m1))
    f_sq = float(np.sum(levels ** 2 * mass))
    g_sq_f_sq = float(np.sum(levels ** 2 * m2))
    g_cube_f = float(np.sum(levels * m3))

    sigma_sq = max(f_sq - mu * mu, 0.0)
    gamma_sq = max(g_sq_f_sq - 2.0 * mu * g_cube_f + 3.0 * mu * mu, 0.0)
    return LinkStats(mu, sigma_sq, gamma_sq)


def link_stats_analytic(link: Link) -> LinkStats:
    """
    Точные параметры нелинейности для зарегистрированных функций связи

    Raises:
        UnsupportedError: для функций связи без замкнутой формы
    """
    if link.kind == "linear":
        return LinkStats(1.0, 0.0, 0.0)
    if link.kind == "sign":
        # γ² = 1 - 4·(2/π) + 3·(2/π) = 1 - 2/π
        return LinkStats(SQRT_2_OVER_PI, SIGN_VARIANCE, SIGN_VARIANCE)
    if link.kind == "cubic":
        # E g⁴ = 3, E g⁶ = 15, E g⁸ = 105
        return LinkStats(3.0, 6.0, 42.0)
    if link.kind == "quantize":
        return _quantize_stats(link)
    raise UnsupportedError(
        f"Для функции связи '{link.kind}' нет замкнутой формы",
        detail="используйте link_stats_mc",
    )


def _gaussian_chunks(seed: SeedLike, samples: int, chunk: int = MC_CHUNK) -> Iterator[np.ndarray]:
    rng = make_rng(seed)
    left = samples
    while left > 0:
        size = min(chunk, left)
        yield rng.standard_normal(size)
        left -= size


def _checked_link(link: Link, g: np.ndarray) -> np.ndarray:
    f = apply_link(link, g)
    bad = np.flatnonzero(~np.isfinite(f))
    if bad.size:
        raise LinkEvaluationError(index=int(bad[0]))
    return f


def link_stats_mc(link: Link, samples: int, seed: SeedLike) -> LinkStats:
    """
    Оценка (μ, σ², γ²) методом Монте-Карло

    μ оценивается как коэффициент наименьших квадратов Σf(g)g / Σg²
    (несмещенно в пределе, т.к. E g² = 1); σ² и γ² - по тем же выборкам
    с подстановкой оценки μ. Стандартные ошибки - дельта-методом.

    Raises:
        PreconditionError: если samples < 1000
        LinkEvaluationError: если функция связи вернула inf/nan
    """
    if samples < MIN_LINK_MC_SAMPLES:
        raise PreconditionError(
            f"Нужно не меньше {MIN_LINK_MC_SAMPLES} выборок", detail=f"samples={samples}"
        )

    # Первый проход: коэффициент μ
    sum_fg = 0.0
    sum_gg = 0.0
    for g in _gaussian_chunks(seed, samples):
        f = _checked_link(link, g)
        sum_fg += float(np.sum(f * g))
        sum_gg += float(np.sum(g * g))
    mu = sum_fg / sum_gg
    mean_gg = sum_gg / samples

    # Второй проход: те же выборки, остатки r = f - μg
    acc = np.zeros(5)
    for g in _gaussian_chunks(seed, samples):
        r = _checked_link(link, g) - mu * g
        r_sq = r * r
        g_sq_r_sq = g * g * r_sq
        acc += (
            np.sum(r_sq),
            np.sum(r_sq * r_sq),
            np.sum(g_sq_r_sq),
            np.sum(g_sq_r_sq * g_sq_r_sq),
            np.sum(g_sq_r_sq),  # (g·r)² для дисперсии μ
        )

    sigma_sq = acc[0] / samples
    gamma_sq = acc[2] / samples
    sigma_sq_se = math.sqrt(max(acc[1] / samples - sigma_sq ** 2, 0.0) / samples)
    gamma_sq_se = math.sqrt(max(acc[3] / samples - gamma_sq ** 2, 0.0) / samples)
    mu_se = math.sqrt(acc[4] / samples / samples) / mean_gg

    seed_value = seed.seed if hasattr(seed, "seed") else int(seed)
    logger.debug(
        f"MC статистики {link.kind}: μ={mu:.6f}±{mu_se:.1e}, σ²={sigma_sq:.6f}, "
        f"γ²={gamma_sq:.6f} ({samples} выборок)"
    )
    return LinkStats(
        mu=float(mu),
        sigma_sq=float(sigma_sq),
        gamma_sq=float(gamma_sq),
        source="monte-carlo",
        samples=samples,
        seed=seed_value,
        mu_se=mu_se,
        sigma_sq_se=sigma_sq_se,
        gamma_sq_se=gamma_sq_se,
    )


def link_stats(link: Link, samples: int = 1_000_000, seed: SeedLike = 0) -> LinkStats:
    """Точные параметры, если они известны, иначе оценка Монте-Карло"""
    if link.kind in ANALYTIC_KINDS:
        return link_stats_analytic(link)
    return link_stats_mc(link, samples, seed)


@dataclass(frozen=True)
class EffectiveNoise:
    """w = f(Xθ*) - μXθ* и его евклидова норма"""

    w: np.ndarray
    norm: float


def _as_matrix(X) -> np.ndarray:
    return X.entries if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)


def check_unit_norm(theta: np.ndarray, name: str = "θ*") -> None:
    norm = float(np.linalg.norm(theta))
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        raise PreconditionError(f"{name} должен иметь единичную евклидову норму",
                                detail=f"||{name}|| = {norm:.12g}")


def effective_noise(link: Link, X, theta_star: np.ndarray, mu: float) -> EffectiveNoise:
    """
    Эффективный шум нелинейной модели относительно линейной μXθ*

    Raises:
        PreconditionError: если ||θ*|| != 1 или размерности не согласованы
    """
    X = _as_matrix(X)
    theta_star = np.asarray(theta_star, dtype=float)
    if X.shape[1] != theta_star.shape[0]:
        raise PreconditionError("Размерности X и θ* не согласованы",
                                detail=f"{X.shape} vs {theta_star.shape}")
    check_unit_norm(theta_star)

    z = X @ theta_star
    w = apply_link(link, z) - mu * z
    return EffectiveNoise(w=w, norm=float(np.linalg.norm(w)))


@dataclass(frozen=True)
class ConcentrationEstimate:
    """Эмпирическая вероятность концентрации p(η)"""

    eta: float
    p_hat: float
    trials: int
    n: int
    norm_frequency: float = 0.0
    correlation_frequency: float = 0.0
    note: Optional[str] = None

    @property
    def std_error(self) -> float:
        return math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "p_hat": self.p_hat,
            "std_error": self.std_error,
            "trials": self.trials,
            "n": self.n,
            "norm_frequency": self.norm_frequency,
            "correlation_frequency": self.correlation_frequency,
            "note": self.note,
        }


def _probe_counts(link: Link, stats: LinkStats, n: int, eta: float,
                  trials: int, seed: SeedLike) -> Tuple[int, int]:
    b_n = gamma_mean_norm(n)
    norm_threshold = eta * b_n * stats.sigma
    corr_threshold = eta * b_n * b_n / math.sqrt(n) * stats.gamma

    rng = make_rng(seed)
    norm_hits = corr_hits = 0
    left = trials
    while left > 0:
        size = min(PROBE_CHUNK_TRIALS, left)
        g = rng.standard_normal((size, n))
        r = apply_link(link, g) - stats.mu * g
        norm_hits += int(np.count_nonzero(np.linalg.norm(r, axis=1) > norm_threshold))
        corr_hits += int(np.count_nonzero(np.abs(np.sum(g * r, axis=1)) > corr_threshold))
        left -= size
    return norm_hits, corr_hits


def concentration_probe(link: Link, n: int, eta: float, trials: int, seed: SeedLike,
                        stats: Optional[LinkStats] = None) -> ConcentrationEstimate:
    """
    Оценка p(η) как суммы частот двух событий (с отсечкой на 1)

    Raises:
        DomainError: если n, eta или trials вне области определения
    """
    if n < 1 or not eta > 0 or trials < 1:
        raise DomainError("Нужны n >= 1, eta > 0, trials >= 1",
                          detail=f"n={n}, eta={eta}, trials={trials}")
    stats = stats or link_stats(link)

    if stats.sigma_sq == 0.0 and stats.gamma_sq == 0.0:
        return ConcentrationEstimate(
            eta=eta, p_hat=0.0, trials=trials, n=n,
            note="σ = γ = 0: оба события имеют нулевую меру",
        )

    norm_hits, corr_hits = _probe_counts(link, stats, n, eta, trials, seed)
    p_hat = min(1.0, (norm_hits + corr_hits) / trials)
    return ConcentrationEstimate(
        eta=eta,
        p_hat=p_hat,
        trials=trials,
        n=n,
        norm_frequency=norm_hits / trials,
        correlation_frequency=corr_hits / trials,
    )
