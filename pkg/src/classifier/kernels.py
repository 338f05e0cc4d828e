"""
Ядра. Все функции векторизованы по numpy.
"""
import math

import numpy as np


def _check_sigma(sigma: float):
    if sigma <= 0:
        raise ValueError(f"sigma должна быть > 0, получено {sigma}")


def gaussian_peak(sigma: float) -> float:
    _check_sigma(sigma)
    return 1.0 / (sigma * math.sqrt(2.0 * math.pi))


def gaussian_kernel_sq(sq_dist, sigma: float):
    """Гауссово ядро от квадрата расстояния"""
    peak = gaussian_peak(sigma)
    return peak * np.exp(-np.asarray(sq_dist, dtype=float) / (2.0 * sigma * sigma))


def gaussian_kernel(dist, sigma: float):
    """(1 / (sigma * sqrt(2*pi))) * exp(-dist^2 / (2 * sigma^2))"""
    d = np.asarray(dist, dtype=float)
    if np.any(d < 0):
        raise ValueError("Расстояние должно быть >= 0")
    result = gaussian_kernel_sq(d * d, sigma)
    return float(result) if result.ndim == 0 else result


def logistic_kernel(u):
    """1 / (e^u + 2 + e^-u), в устойчивой форме e^-|u| / (1 + e^-|u|)^2"""
    t = np.exp(-np.abs(np.asarray(u, dtype=float)))
    result = t / (1.0 + t) ** 2
    return float(result) if result.ndim == 0 else result


def logistic_kernel_sq(sq_dist, sigma: float):
    """Логистическое ядро с шириной sigma: K(d / sigma) / sigma"""
    _check_sigma(sigma)
    d = np.sqrt(np.asarray(sq_dist, dtype=float))
    return logistic_kernel(d / sigma) / sigma


def uniform_kernel(dist, width: float):
    """1 / (2w) при dist <= w, иначе 0"""
    d = np.asarray(dist, dtype=float)
    if width <= 0:
        raise ValueError("Ширина равномерного ядра должна быть > 0")
    return np.where(d <= width, 1.0 / (2.0 * width), 0.0)


KERNELS_SQ = {
    'gaussian': gaussian_kernel_sq,
    'logistic': logistic_kernel_sq,
}


def get_kernel(name: str):
    try:
        return KERNELS_SQ[name]
    except KeyError:
        raise ValueError(f"Неизвестное ядро '{name}', доступны: {sorted(KERNELS_SQ)}")
