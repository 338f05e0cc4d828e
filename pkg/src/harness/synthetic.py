"""
Синтетические наборы данных для тестов и демонстраций.
"""
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.classifier.dataset import Dataset


def make_two_gaussians(n: int = 200, m: int = 2, separation: float = 0.4, scale: float = 0.1,
                       seed: Optional[int] = None) -> Dataset:
    """Два класса: нормальные облака вокруг 0.5 -+ separation/2 по всем осям, обрезка в [0, 1]"""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    centers = np.where(labels[:, None] == 0, 0.5 - separation / 2, 0.5 + separation / 2)
    X = np.clip(centers + scale * rng.standard_normal((n, m)), 0.0, 1.0)
    return Dataset(X, labels, 2)


@dataclass
class UnbalancedScenario:
    data: Dataset
    minority_point: np.ndarray
    sigma: float
    queries: np.ndarray

    @property
    def minority_weight(self) -> float:
        """Вес класса меньшинства, при котором KDE снова видит точку меньшинства"""
        counts = self.data.class_counts()
        return float(counts[0]) / float(counts[1])


def make_unbalanced_scenario(n_majority: int = 24, radius: float = 0.1, sigma: float = 0.25,
                             grid_size: int = 11) -> UnbalancedScenario:
    """
    Точка класса 1 в центре, окруженная кольцом из n_majority точек класса 0.
    При таком sigma KDE предсказывает класс 0 во всем квадрате, 1-NN - нет.
    """
    center = np.array([0.5, 0.5])
    angles = 2 * np.pi * np.arange(n_majority) / n_majority
    ring = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    X = np.vstack([center[None, :], ring])
    y = np.concatenate([[1], np.zeros(n_majority, dtype=np.int64)])
    axis = np.linspace(0.0, 1.0, grid_size)
    queries = np.array(list(itertools.product(axis, axis)))
    return UnbalancedScenario(Dataset(X, y, 2), center, sigma, queries)


def make_grid_dataset(points_per_axis: int = 5, m: int = 2, n_classes: int = 2) -> Dataset:
    """Регулярная сетка в [0, 1]^m, класс = сумма индексов по модулю n_classes"""
    axis = np.linspace(0.0, 1.0, points_per_axis)
    idx = np.array(list(itertools.product(range(points_per_axis), repeat=m)))
    return Dataset(axis[idx], idx.sum(axis=1) % n_classes, n_classes)
