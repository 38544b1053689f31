"""
Касательный конус и множество спуска ℓ1-нормы в разреженной точке

Проекция на касательный конус C строится через разложение Моро:
P_C(v) = v - P_K(v), где K = cone(∂||θ||_1) - поляра C. Ближайшая точка
K лежит на λ*·∂||θ||_1, и λ* находится точно из кусочно-линейного
уравнения по отсортированным модулям вне носителя.
"""

import numpy as np

from src.exceptions import DomainError
from src.geometry.regularizers import project_l1_ball


def _support(theta: np.ndarray):
    theta = np.asarray(theta, dtype=float)
    on = theta != 0
    return on, np.sign(theta[on])


def polar_level_l1(v: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """
    Уровень λ*, минимизирующий dist(v, λ∂||θ||_1) по λ >= 0

    v может быть вектором или матрицей (построчно). Требует θ != 0.
    """
    V = np.atleast_2d(np.asarray(v, dtype=float))
    on, signs = _support(theta)
    m_on = int(on.sum())
    if m_on == 0:
        raise DomainError("Касательный конус в θ = 0 вырожден")

    c = V[:, on] @ signs
    a = -np.sort(-np.abs(V[:, ~on]), axis=1)
    q = a.shape[1]
    cums = np.concatenate([np.zeros((V.shape[0], 1)), np.cumsum(a, axis=1)], axis=1)
    k = np.arange(q + 1)

    # На интервале, где ровно k модулей вне носителя больше λ, производная
    # (m_on + k)λ - c - cums[k] линейна, ее корень - кандидат
    lam = (c[:, None] + cums) / (m_on + k)[None, :]
    upper = np.concatenate([np.full((V.shape[0], 1), np.inf), a], axis=1)
    lower = np.concatenate([a, np.zeros((V.shape[0], 1))], axis=1)
    valid = (lam >= lower) & (lam <= upper)

    first = np.argmax(valid, axis=1)
    found = valid[np.arange(V.shape[0]), first]
    level = np.where(found, lam[np.arange(V.shape[0]), first], 0.0)
    level = np.maximum(level, 0.0)
    return level if np.ndim(v) == 2 else level[0]


def project_tangent_cone_l1(v: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """
    Евклидова проекция на касательный конус ℓ1-нормы в θ

    Для θ = 0 конус равен {0}.
    """
    v = np.asarray(v, dtype=float)
    on, signs = _support(theta)
    if not on.any():
        return np.zeros_like(v)

    V = np.atleast_2d(v)
    level = np.atleast_1d(polar_level_l1(V, theta))[:, None]
    polar = np.clip(V, -level, level)
    polar[:, on] = level * signs[None, :]
    out = V - polar
    return out if v.ndim == 2 else out[0]


def project_descent_set_l1(v: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Проекция на множество спуска {h: ||θ + h||_1 <= ||θ||_1}"""
    theta = np.asarray(theta, dtype=float)
    return project_l1_ball(theta + np.asarray(v, dtype=float), float(np.abs(theta).sum())) - theta


def sample_cone_directions(theta: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    Единичные направления из касательного конуса ℓ1 в разреженной θ

    Смесь трех источников: проекции гауссовых векторов на конус,
    знако-согласованные разреженные направления и выпуклые комбинации
    пар уже выбранных направлений.

    Returns:
        np.ndarray: матрица count×p с единичными строками
    """
    theta = np.asarray(theta, dtype=float)
    on, signs = _support(theta)
    if not on.any():
        raise DomainError("Касательный конус в θ = 0 вырожден")
    p = theta.size
    off = np.flatnonzero(~on)

    n_proj = max(count // 2, 1)
    n_sparse = max((count - n_proj) // 2, 1)
    n_mix = max(count - n_proj - n_sparse, 0)

    projected = project_tangent_cone_l1(rng.standard_normal((n_proj, p)), theta)

    sparse = np.zeros((n_sparse, p))
    u = np.abs(rng.standard_normal((n_sparse, int(on.sum()))))
    sparse[:, on] = -u * signs[None, :]
    budget = u.sum(axis=1) * rng.uniform(size=n_sparse)
    width = min(int(on.sum()), off.size)
    for row in range(n_sparse):
        if width == 0:
            break
        cols = rng.choice(off, size=width, replace=False)
        w = rng.standard_normal(width)
        sparse[row, cols] = w * budget[row] / np.abs(w).sum()

    directions = np.vstack([projected, sparse])
    norms = np.linalg.norm(directions, axis=1)
    directions = directions[norms > 0] / norms[norms > 0, None]

    if n_mix and directions.shape[0] >= 2:
        i = rng.integers(0, directions.shape[0], size=n_mix)
        j = rng.integers(0, directions.shape[0], size=n_mix)
        weight = rng.uniform(size=(n_mix, 1))
        mixed = weight * directions[i] + (1.0 - weight) * directions[j]
        norms = np.linalg.norm(mixed, axis=1)
        directions = np.vstack([directions, mixed[norms > 1e-12] / norms[norms > 1e-12, None]])

    return directions
