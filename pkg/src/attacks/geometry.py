"""
Триангуляция: точка по d+1 центрам сфер и их радиусам.
"""
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from config.settings import Config
from src.utils.errors import DegenerateGeometryError, InconsistentRadiiError


def sphere_residual(point: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> float:
    """max_i | ||x - c_i|| - r_i |"""
    return float(np.max(np.abs(np.linalg.norm(centers - point, axis=1) - radii)))


def triangulate_with_residual(centers: Sequence[Sequence[float]],
                              radii: Sequence[float]) -> Tuple[np.ndarray, float]:
    """
    Вычитаем уравнение первой сферы из остальных:
    2 (c_i - c_0) . x = r_0^2 - r_i^2 + |c_i|^2 - |c_0|^2, i = 1..d.
    """
    C = np.asarray(centers, dtype=float)
    r = np.asarray(radii, dtype=float).reshape(-1)
    if C.ndim != 2 or C.shape[0] != C.shape[1] + 1:
        raise DegenerateGeometryError(f"Нужно d+1 центров размерности d, получено {C.shape}")
    if r.shape[0] != C.shape[0]:
        raise DegenerateGeometryError("Число радиусов не совпадает с числом центров")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise InconsistentRadiiError("Радиусы должны быть конечными и >= 0")

    A = 2.0 * (C[1:] - C[0])
    sq = np.einsum('ij,ij->i', C, C)
    b = r[0] ** 2 - r[1:] ** 2 + sq[1:] - sq[0]
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise DegenerateGeometryError("Центры аффинно зависимы")
    try:
        point = linalg.solve(A, b)
    except linalg.LinAlgError as e:
        raise DegenerateGeometryError(f"Система вырождена: {e}") from e
    return point, sphere_residual(point, C, r)


def triangulate(centers: Sequence[Sequence[float]], radii: Sequence[float],
                tolerance: Optional[float] = None) -> np.ndarray:
    tolerance = Config.ATTACK_CONFIG['residual_tolerance'] if tolerance is None else tolerance
    point, residual = triangulate_with_residual(centers, radii)
    if residual > tolerance:
        raise InconsistentRadiiError(f"Сферы не пересекаются в одной точке: невязка {residual:.3e}")
    return point
