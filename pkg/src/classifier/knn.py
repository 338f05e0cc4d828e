"""
Точный k-NN полным перебором. Равные расстояния упорядочиваются по индексу кортежа.
"""
from typing import List, Tuple

import numpy as np

from src.classifier.dataset import Dataset


def _check_k(data: Dataset, k: int):
    if not 1 <= k <= len(data):
        raise ValueError(f"k={k} вне [1, {len(data)}]")


def neighbor_order(data: Dataset, q, k: int) -> Tuple[np.ndarray, np.ndarray]:
    q = data.check_query(q)
    _check_k(data, k)
    diff = data.X - q
    dist = np.sqrt(np.einsum('ij,ij->i', diff, diff))
    order = np.argsort(dist, kind='stable')[:k]
    return order, dist[order]


def knn_neighbors(data: Dataset, q, k: int) -> List[Tuple[int, float]]:
    order, dist = neighbor_order(data, q, k)
    return [(int(i), float(d)) for i, d in zip(order, dist)]


def knn_classify_majority(data: Dataset, q, k: int) -> int:
    order, _ = neighbor_order(data, q, k)
    votes = np.bincount(data.y[order], minlength=data.c)
    return int(np.argmax(votes))


def knn_classify_all(data: Dataset, q, k: int) -> Tuple[int, ...]:
    """Метки всех k соседей (мультимножество, отсортировано)"""
    order, _ = neighbor_order(data, q, k)
    return tuple(sorted(int(label) for label in data.y[order]))
