"""
Эталонные классификаторы: ядра, KDE, k-NN
"""

from .dataset import DataTuple, Dataset, ClassScores
from .kernels import gaussian_kernel, logistic_kernel
from .kde import kde_scores, kde_classify, kde_scores_batch, uniform_kernel_scores
from .knn import knn_neighbors, knn_classify_majority, knn_classify_all

__all__ = [
    'DataTuple', 'Dataset', 'ClassScores',
    'gaussian_kernel', 'logistic_kernel',
    'kde_scores', 'kde_classify', 'kde_scores_batch', 'uniform_kernel_scores',
    'knn_neighbors', 'knn_classify_majority', 'knn_classify_all',
]
