"""
Обертки fit/predict над эталонными классификаторами (используются harness).
"""
from typing import Dict, Optional

import numpy as np

from src.classifier.dataset import Dataset
from src.classifier.kde import kde_scores_batch, uniform_kernel_scores
from src.classifier.knn import knn_classify_majority


class BaseClassifier:
    name = "base"

    def __init__(self):
        self.data: Optional[Dataset] = None

    def fit(self, data: Dataset) -> "BaseClassifier":
        self.data = data
        return self

    def _require_fit(self):
        if self.data is None:
            raise RuntimeError(f"{self.name}: сначала вызовите fit()")

    def predict(self, X) -> np.ndarray:
        raise NotImplementedError

    @property
    def params(self) -> Dict:
        return {}

    def describe(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))


class KnnClassifier(BaseClassifier):
    name = "knn"

    def __init__(self, k: int):
        super().__init__()
        self.k = int(k)

    @property
    def params(self) -> Dict:
        return {'k': self.k}

    def predict(self, X) -> np.ndarray:
        self._require_fit()
        return np.array([knn_classify_majority(self.data, q, self.k) for q in np.atleast_2d(X)], dtype=np.int64)


class KdeClassifier(BaseClassifier):
    name = "kde"

    def __init__(self, sigma: float, kernel: str = 'gaussian'):
        super().__init__()
        self.sigma = float(sigma)
        self.kernel = kernel

    @property
    def params(self) -> Dict:
        params = {'sigma': self.sigma}
        if self.kernel != 'gaussian':
            params['kernel'] = self.kernel
        return params

    def scores(self, X) -> np.ndarray:
        self._require_fit()
        return kde_scores_batch(self.data, X, self.sigma, self.kernel)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.scores(X), axis=1).astype(np.int64)


class UniformKernelClassifier(BaseClassifier):
    """k-NN в форме KDE с равномерным ядром переменной ширины"""
    name = "uniform"

    def __init__(self, k: int):
        super().__init__()
        self.k = int(k)

    @property
    def params(self) -> Dict:
        return {'k': self.k}

    def predict(self, X) -> np.ndarray:
        self._require_fit()
        return np.array([uniform_kernel_scores(self.data, q, self.k).argmax() for q in np.atleast_2d(X)],
                        dtype=np.int64)


CLASSIFIERS = {
    'knn': KnnClassifier,
    'kde': KdeClassifier,
    'uniform': UniformKernelClassifier,
}


def make_classifier(algo: str, **params) -> BaseClassifier:
    try:
        cls = CLASSIFIERS[algo]
    except KeyError:
        raise ValueError(f"Неизвестный алгоритм '{algo}', доступны: {sorted(CLASSIFIERS)}")
    return cls(**params)
