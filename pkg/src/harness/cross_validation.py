"""
Подбор k и sigma перебором по сетке с кросс-валидацией.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from src.classifier.dataset import Dataset
from src.classifier.estimators import make_classifier
from src.utils.logger import logger

# Имя параметра сетки для каждого алгоритма
GRID_PARAMS = {'knn': 'k', 'uniform': 'k', 'kde': 'sigma'}


@dataclass
class CvResult:
    algorithm: str
    param: str
    best: float
    table: pd.DataFrame

    @property
    def best_params(self) -> dict:
        value = int(self.best) if self.param == 'k' else float(self.best)
        return {self.param: value}


def stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Индексы фолдов: кортежи каждого класса раскладываются по кругу"""
    buckets: List[list] = [[] for _ in range(folds)]
    offset = 0
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            buckets[(offset + j) % folds].append(i)
        offset += len(idx)
    return [np.sort(np.array(b, dtype=np.int64)) for b in buckets]


def cross_validate(data: Dataset, algorithm: str, grid: Sequence[float], folds: int = 5,
                   seed: Optional[int] = None, kernel: str = 'gaussian') -> CvResult:
    """
    Параметр с максимальной средней точностью по фолдам.
    При равенстве - более простая модель: меньшее k, большее sigma.
    """
    if algorithm not in GRID_PARAMS:
        raise ValueError(f"Кросс-валидация не поддерживает '{algorithm}'")
    if folds < 2:
        raise ValueError("Нужно не меньше двух фолдов")
    if not grid:
        raise ValueError("Сетка параметров пуста")
    if len(data) < folds:
        raise ValueError(f"Кортежей ({len(data)}) меньше, чем фолдов ({folds})")

    param = GRID_PARAMS[algorithm]
    fold_idx = stratified_folds(data.y, folds, np.random.default_rng(seed))
    all_idx = np.arange(len(data))
    results = []

    for value in grid:
        accuracies = []
        for test_idx in fold_idx:
            train = data.subset(np.setdiff1d(all_idx, test_idx))
            if param == 'k' and len(train) < value:
                raise ValueError(f"Обучающий фолд ({len(train)}) меньше k={value}")
            if len(test_idx) == 0:
                continue
            extra = {'kernel': kernel} if algorithm == 'kde' else {}
            model = make_classifier(algorithm, **{param: value}, **extra).fit(train)
            test = data.subset(test_idx)
            accuracies.append(float(np.mean(model.predict(test.X) == test.y)))
        results.append({param: value, 'mean_accuracy': float(np.mean(accuracies)),
                        'std_accuracy': float(np.std(accuracies))})

    table = pd.DataFrame(results)
    # k по возрастанию, sigma по убыванию: первая строка с максимумом - простейшая модель
    ordered = table.sort_values(param, ascending=(param == 'k'), kind='stable')
    best_row = ordered.loc[ordered['mean_accuracy'].idxmax()]
    best = best_row[param]
    logger.info(f"🔍 CV {algorithm}: {param}={best} (точность {best_row['mean_accuracy']:.4f})")
    return CvResult(algorithm, param, best, table)
