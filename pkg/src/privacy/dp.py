"""
Дифференциальная приватность для оценок KDE: шум Лапласа на вектор оценок классов.

Чувствительность: добавление одного кортежа меняет ровно одну сумму класса
на одно значение ядра, не больше пика 1 / (sigma * sqrt(2 pi)).
"""
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from src.classifier.dataset import ClassScores, Dataset
from src.classifier.kde import kde_scores
from src.classifier.kernels import gaussian_peak
from src.utils.rng import RandomSource


def sensitivity(sigma: float) -> float:
    """Delta f = 1 / (sigma * sqrt(2 pi))"""
    if sigma <= 0:
        raise ValueError(f"sigma должна быть > 0, получено {sigma}")
    return gaussian_peak(sigma)


@dataclass(frozen=True)
class DpParams:
    lam: float
    sigma: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("Масштаб шума lambda должен быть > 0")
        if self.sigma <= 0:
            raise ValueError("sigma должна быть > 0")

    @property
    def epsilon(self) -> float:
        """epsilon = Delta f / lambda"""
        return sensitivity(self.sigma) / self.lam

    @classmethod
    def for_epsilon(cls, epsilon: float, sigma: float) -> "DpParams":
        if epsilon <= 0:
            raise ValueError("epsilon должен быть > 0")
        return cls(lam=sensitivity(sigma) / epsilon, sigma=sigma)


NoiseSource = Union[RandomSource, np.random.Generator, None]


def _generator(rng: NoiseSource) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return (rng or RandomSource()).numpy_generator()


def laplace_noise(lam: float, size: int, rng: NoiseSource = None) -> np.ndarray:
    """
    Обратная функция распределения: u ~ U(-1/2, 1/2), x = -lam * sign(u) * ln(1 - 2|u|).
    """
    if lam <= 0:
        raise ValueError("lambda должна быть > 0")
    gen = _generator(rng)
    u = gen.uniform(-0.5, 0.5, size=size)
    return -lam * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def laplace_perturb(scores: ClassScores, lam: float, rng: NoiseSource = None) -> np.ndarray:
    """
    Оценки плюс независимый шум Laplace(0, lam).
    Возвращается массив: после шума оценки могут стать отрицательными.
    """
    return scores.as_array() + laplace_noise(lam, scores.c, rng)


def dp_classify(data: Dataset, q: Sequence[float], sigma: float, lam: float,
                rng: NoiseSource = None) -> int:
    """argmax зашумленных оценок (наименьший индекс при равенстве)"""
    noisy = laplace_perturb(kde_scores(data, q, sigma), lam, rng)
    return int(np.argmax(noisy))


def score_l1_change(data: Dataset, neighbor: Dataset, q: Sequence[float], sigma: float) -> float:
    """L1-изменение вектора оценок между соседними наборами"""
    a = kde_scores(data, q, sigma).as_array()
    b = kde_scores(neighbor, q, sigma).as_array()
    return float(np.sum(np.abs(a - b)))


def privacy_loss_bound(params: DpParams) -> float:
    """Граница отношения вероятностей исходов: e^epsilon"""
    return math.exp(params.epsilon)
