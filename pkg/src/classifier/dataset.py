"""
Базовые типы данных классификатора: кортеж, набор данных, вектор оценок классов.
"""
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.utils.errors import DimensionMismatchError, DatasetError


@dataclass(frozen=True)
class DataTuple:
    features: tuple
    label: int

    def __post_init__(self):
        object.__setattr__(self, 'features', tuple(float(x) for x in self.features))
        if self.label < 0:
            raise DatasetError(f"Метка класса должна быть >= 0, получено {self.label}")

    @property
    def m(self) -> int:
        return len(self.features)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.features, dtype=float)


class Dataset:
    """
    Неизменяемый набор кортежей: матрица признаков (n x m) и вектор меток.
    class_weights - множители по классам (взвешенный базисный вектор), по умолчанию 1.0.
    """

    def __init__(self, features, labels, n_classes: int,
                 class_weights: Optional[Sequence[float]] = None, m: Optional[int] = None):
        X = np.asarray(features, dtype=float)
        if X.size == 0:
            X = X.reshape(0, m if m is not None else 0)
        if X.ndim != 2:
            raise DimensionMismatchError(f"Ожидалась матрица признаков, получено ndim={X.ndim}")
        y = np.asarray(labels, dtype=np.int64).reshape(-1)
        if len(y) != X.shape[0]:
            raise DimensionMismatchError(f"{X.shape[0]} строк признаков, {len(y)} меток")
        if m is not None and X.shape[1] != m:
            raise DimensionMismatchError(f"Размерность {X.shape[1]}, ожидалось {m}")
        if n_classes < 1:
            raise DatasetError("Число классов должно быть >= 1")
        if len(y) and (y.min() < 0 or y.max() >= n_classes):
            raise DatasetError(f"Метки должны лежать в [0, {n_classes})")

        if class_weights is None:
            w = np.ones(n_classes)
        else:
            w = np.asarray(class_weights, dtype=float)
            if w.shape != (n_classes,) or np.any(w <= 0):
                raise DatasetError("class_weights: нужно c положительных значений")

        for arr in (X, y, w):
            arr.setflags(write=False)
        self._X, self._y, self._w = X, y, w
        self.c = n_classes

    # --- Конструкторы ---

    @classmethod
    def from_tuples(cls, tuples: Iterable[DataTuple], n_classes: int,
                    m: Optional[int] = None, class_weights=None) -> "Dataset":
        tuples = list(tuples)
        dims = {t.m for t in tuples}
        if len(dims) > 1:
            raise DimensionMismatchError(f"Кортежи разной размерности: {sorted(dims)}")
        if m is None:
            m = dims.pop() if dims else 0
        X = np.array([t.features for t in tuples], dtype=float).reshape(len(tuples), m)
        y = [t.label for t in tuples]
        return cls(X, y, n_classes, class_weights=class_weights, m=m)

    # --- Свойства ---

    @property
    def X(self) -> np.ndarray:
        return self._X

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def class_weights(self) -> np.ndarray:
        return self._w

    @property
    def m(self) -> int:
        return self._X.shape[1]

    def __len__(self):
        return self._X.shape[0]

    def __getitem__(self, i: int) -> DataTuple:
        return DataTuple(tuple(self._X[i]), int(self._y[i]))

    @property
    def tuples(self) -> List[DataTuple]:
        return [self[i] for i in range(len(self))]

    def __repr__(self):
        return f"Dataset(n={len(self)}, m={self.m}, c={self.c})"

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.c == other.c and np.array_equal(self._X, other._X)
                and np.array_equal(self._y, other._y) and np.array_equal(self._w, other._w))

    def class_counts(self) -> np.ndarray:
        return np.bincount(self._y, minlength=self.c)

    # --- Производные наборы ---

    def _derive(self, X, y) -> "Dataset":
        return Dataset(X, y, self.c, class_weights=self._w, m=self.m)

    def with_tuple(self, t: DataTuple) -> "Dataset":
        """Новый набор с кортежем t в конце"""
        if t.m != self.m:
            raise DimensionMismatchError(f"Кортеж размерности {t.m}, набор {self.m}")
        return self._derive(np.vstack([self._X, np.asarray(t.features)[None, :]]),
                            np.append(self._y, t.label))

    def without_index(self, i: int) -> "Dataset":
        if not 0 <= i < len(self):
            raise IndexError(f"Индекс {i} вне набора из {len(self)} кортежей")
        keep = np.arange(len(self)) != i
        return self._derive(self._X[keep], self._y[keep])

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return self._derive(self._X[idx], self._y[idx])

    def with_class_weights(self, weights: Sequence[float]) -> "Dataset":
        return Dataset(self._X, self._y, self.c, class_weights=weights, m=self.m)

    def check_query(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float).reshape(-1)
        if q.shape[0] != self.m:
            raise DimensionMismatchError(f"Запрос размерности {q.shape[0]}, данные {self.m}")
        return q

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self._X, columns=[f"f{i}" for i in range(self.m)])
        df['label'] = self._y
        return df


@dataclass(frozen=True)
class ClassScores:
    """Суммы значений ядра по классам (вектор A)"""
    scores: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.scores)
        if any(not np.isfinite(v) or v < 0 for v in values):
            raise ValueError("Оценки классов должны быть конечными и >= 0")
        object.__setattr__(self, 'scores', values)

    @property
    def c(self) -> int:
        return len(self.scores)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.scores, dtype=float)

    def __getitem__(self, j: int) -> float:
        return self.scores[j]

    def argmax(self) -> int:
        """Индекс максимума, при равенстве - наименьший"""
        return int(np.argmax(self.as_array()))

    def relative_gap(self) -> float:
        """(top - runner_up) / top; 0 при равенстве, 1 если второй класс нулевой"""
        ordered = sorted(self.scores, reverse=True)
        if len(ordered) < 2:
            return 1.0
        top, second = ordered[0], ordered[1]
        if top == 0:
            return 0.0
        return (top - second) / top
