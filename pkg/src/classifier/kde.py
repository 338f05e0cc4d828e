"""
Классификация по ядерной оценке плотности (открытый эталон для зашифрованного протокола).
"""
from typing import Tuple

import numpy as np
from scipy.spatial.distance import cdist

from src.classifier.dataset import ClassScores, Dataset
from src.classifier.kernels import get_kernel
from src.classifier.knn import knn_neighbors


def squared_distances(data: Dataset, q: np.ndarray) -> np.ndarray:
    """Квадраты L2-расстояний, каждая строка считается независимо"""
    diff = data.X - q
    return np.einsum('ij,ij->i', diff, diff)


def _class_sums(data: Dataset, values: np.ndarray) -> np.ndarray:
    # bincount суммирует в порядке индексов: добавленный в конец кортеж прибавляется последним
    sums = np.bincount(data.y, weights=values, minlength=data.c) if len(data) else np.zeros(data.c)
    return sums * data.class_weights


def kde_scores(data: Dataset, q, sigma: float, kernel: str = 'gaussian') -> ClassScores:
    q = data.check_query(q)
    values = get_kernel(kernel)(squared_distances(data, q), sigma)
    return ClassScores(tuple(_class_sums(data, np.atleast_1d(values))))


def kde_classify(data: Dataset, q, sigma: float, kernel: str = 'gaussian') -> int:
    return kde_scores(data, q, sigma, kernel).argmax()


def kde_scores_batch(data: Dataset, Q, sigma: float, kernel: str = 'gaussian') -> np.ndarray:
    """Матрица (|Q| x c) оценок для пакета запросов"""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.shape[1] != data.m:
        data.check_query(Q[0])
    if len(data) == 0:
        return np.zeros((Q.shape[0], data.c))
    K = get_kernel(kernel)(cdist(Q, data.X, 'sqeuclidean'), sigma)
    onehot = np.zeros((len(data), data.c))
    onehot[np.arange(len(data)), data.y] = 1.0
    return (K @ onehot) * data.class_weights


def kde_classify_batch(data: Dataset, Q, sigma: float, kernel: str = 'gaussian') -> np.ndarray:
    return np.argmax(kde_scores_batch(data, Q, sigma, kernel), axis=1)


def uniform_kernel_width(data: Dataset, q, k: int) -> float:
    return knn_neighbors(data, q, k)[-1][1]


def uniform_kernel_scores(data: Dataset, q, k: int) -> ClassScores:
    """
    k-NN как KDE с равномерным ядром ширины d_k (расстояние до k-го соседа).
    При d_k = 0 ядро вырождено: считаем число кортежей на нулевом расстоянии.
    """
    q = data.check_query(q)
    width = uniform_kernel_width(data, q, k)
    dist = np.sqrt(squared_distances(data, q))
    inside = dist <= width
    if width == 0:
        values = inside.astype(float)
    else:
        values = np.where(inside, 1.0 / (2.0 * width), 0.0)
    return ClassScores(tuple(_class_sums(data, values)))


def uniform_classify(data: Dataset, q, k: int) -> int:
    return uniform_kernel_scores(data, q, k).argmax()


def top_two_gap(scores: np.ndarray) -> Tuple[int, float]:
    """(argmax, относительный разрыв) для строки оценок"""
    cs = ClassScores(tuple(scores))
    return cs.argmax(), cs.relative_gap()
