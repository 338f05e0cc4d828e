import math

import numpy as np
import pytest
from scipy import integrate

from src.classifier.dataset import ClassScores, DataTuple, Dataset
from src.classifier.estimators import KdeClassifier, KnnClassifier, make_classifier
from src.classifier.kde import (
    kde_classify, kde_classify_batch, kde_scores, kde_scores_batch, squared_distances, top_two_gap,
    uniform_classify, uniform_kernel_scores,
)
from src.classifier.kernels import (
    gaussian_kernel, gaussian_kernel_sq, gaussian_peak, get_kernel, logistic_kernel, uniform_kernel,
)
from src.classifier.knn import knn_classify_all, knn_classify_majority, knn_neighbors
from src.harness.synthetic import make_two_gaussians, make_unbalanced_scenario
from src.utils.errors import DatasetError, DimensionMismatchError


def test_gaussian_kernel_values():
    assert gaussian_kernel(0.0, 0.25) == pytest.approx(1.5957691216057308)
    assert gaussian_kernel(0.25, 0.25) == pytest.approx(gaussian_peak(0.25) * math.exp(-0.5))
    with pytest.raises(ValueError):
        gaussian_kernel(-1.0, 0.25)
    with pytest.raises(ValueError):
        gaussian_peak(0.0)


@pytest.mark.parametrize("sigma", [0.05, 0.25, 1.0])
def test_gaussian_kernel_is_normalised(sigma):
    total, _ = integrate.quad(lambda x: gaussian_kernel(abs(x), sigma), -20 * sigma, 20 * sigma)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_other_kernels():
    assert logistic_kernel(0.0) == pytest.approx(0.25)
    assert logistic_kernel(800.0) >= 0.0
    assert uniform_kernel(0.5, 1.0) == pytest.approx(0.5)
    assert uniform_kernel(1.5, 1.0) == 0.0
    with pytest.raises(ValueError):
        get_kernel('epanechnikov')


def test_two_point_classification():
    data = Dataset([[0.0, 0.0], [1.0, 1.0]], [0, 1], 2)
    assert kde_classify(data, [0.4, 0.4], 0.25) == 0
    assert kde_classify(data, [0.6, 0.6], 0.25) == 1


def test_tie_resolves_to_smallest_class():
    data = Dataset([[0.0, 0.0], [1.0, 1.0]], [1, 0], 2)
    assert kde_classify(data, [0.5, 0.5], 0.25) == 0


def test_empty_class_scores_zero(toy_dataset):
    data = Dataset(toy_dataset.X, toy_dataset.y, 3)
    scores = kde_scores(data, [0.5, 0.5], 0.25)
    assert scores[2] == 0.0
    assert scores.c == 3


def test_scores_are_class_sums(toy_dataset):
    q = np.array([0.3, 0.3])
    scores = kde_scores(toy_dataset, q, 0.25)
    d = np.linalg.norm(toy_dataset.X - q, axis=1)
    expected0 = sum(gaussian_kernel(d[i], 0.25) for i in range(3))
    assert scores[0] == pytest.approx(expected0)


@pytest.mark.parametrize("label", [0, 1])
def test_insertion_adds_exactly_one_kernel(toy_dataset, label):
    q = np.array([0.4, 0.35])
    t = DataTuple((0.625, 0.5), label)
    before = kde_scores(toy_dataset, q, 0.25)
    after = kde_scores(toy_dataset.with_tuple(t), q, 0.25)
    d2 = squared_distances(Dataset([t.features], [label], 2), q)[0]
    for k in range(2):
        expected = before[k] + gaussian_kernel_sq(d2, 0.25) if k == label else before[k]
        assert after[k] == pytest.approx(expected, rel=1e-14)
    assert after[label] - before[label] == pytest.approx(gaussian_kernel(math.dist(t.features, q), 0.25),
                                                          rel=1e-12)


def test_deletion_is_symmetric_to_insertion(toy_dataset):
    q = np.array([0.4, 0.35])
    grown = toy_dataset.with_tuple(DataTuple((0.625, 0.5), 1))
    assert kde_scores(grown.without_index(len(grown) - 1), q, 0.25) == kde_scores(toy_dataset, q, 0.25)

    # удаление из середины: минус ядро удаленного кортежа
    before = kde_scores(toy_dataset, q, 0.25)
    after = kde_scores(toy_dataset.without_index(1), q, 0.25)
    removed = gaussian_kernel(math.dist(toy_dataset.X[1], q), 0.25)
    assert after[0] == pytest.approx(before[0] - removed, rel=1e-12)
    assert after[1] == pytest.approx(before[1], rel=1e-14)


def test_classification_ignores_tuple_order():
    data = make_two_gaussians(n=40, seed=8)
    gen = np.random.default_rng(8)
    Q = gen.uniform(0, 1, size=(25, data.m))
    expected = kde_classify_batch(data, Q, 0.25)
    for _ in range(3):
        shuffled = data.subset(gen.permutation(len(data)))
        assert [kde_classify(shuffled, q, 0.25) for q in Q] == expected.tolist()
        assert np.allclose(kde_scores_batch(shuffled, Q, 0.25), kde_scores_batch(data, Q, 0.25), rtol=1e-12)


def test_batch_matches_single_queries():
    data = make_two_gaussians(n=60, seed=3)
    Q = make_two_gaussians(n=10, seed=4).X
    batch = kde_scores_batch(data, Q, 0.2)
    for row, q in zip(batch, Q):
        assert row == pytest.approx(kde_scores(data, q, 0.2).as_array())
    assert kde_classify_batch(data, Q, 0.2).tolist() == [kde_classify(data, q, 0.2) for q in Q]


def test_query_dimension_mismatch(toy_dataset):
    with pytest.raises(DimensionMismatchError):
        kde_scores(toy_dataset, [0.1, 0.2, 0.3], 0.25)


def test_dataset_validation():
    with pytest.raises(DatasetError):
        Dataset([[0.1], [0.2]], [0, 2], 2)
    with pytest.raises(DimensionMismatchError):
        Dataset([[0.1], [0.2]], [0], 2)
    with pytest.raises(DatasetError):
        Dataset([[0.1]], [0], 1, class_weights=[0.0])


def test_dataset_derivations(toy_dataset):
    grown = toy_dataset.with_tuple(DataTuple((0.5, 0.5), 1))
    assert len(grown) == 7
    assert grown[6] == DataTuple((0.5, 0.5), 1)
    assert grown.without_index(6) == toy_dataset
    assert toy_dataset.class_counts().tolist() == [3, 3]
    assert list(toy_dataset.to_frame().columns) == ['f0', 'f1', 'label']


def test_knn_ties_by_index():
    data = Dataset([[0.0], [0.5], [1.0]], [1, 0, 0], 2)
    neighbors = knn_neighbors(data, [0.5], 3)
    assert [i for i, _ in neighbors] == [1, 0, 2]
    assert knn_classify_all(data, [0.5], 3) == (0, 0, 1)
    assert knn_classify_majority(data, [0.5], 3) == 0
    with pytest.raises(ValueError):
        knn_neighbors(data, [0.5], 4)


def test_uniform_kernel_agrees_with_majority(toy_dataset):
    for q in ([0.2, 0.2], [0.8, 0.8], [0.3, 0.6]):
        assert uniform_classify(toy_dataset, q, 3) == knn_classify_majority(toy_dataset, q, 3)
    exact = uniform_kernel_scores(toy_dataset, toy_dataset.X[0], 1)
    assert exact.argmax() == 0


def test_unbalanced_scenario_weighting():
    scenario = make_unbalanced_scenario()
    center = scenario.minority_point
    assert kde_classify(scenario.data, center, scenario.sigma) == 0
    assert knn_classify_majority(scenario.data, center, 1) == 1
    weighted = scenario.data.with_class_weights([1.0, scenario.minority_weight])
    assert kde_classify(weighted, center, scenario.sigma) == 1


def test_class_scores_gap():
    scores = ClassScores((3.0, 1.0))
    assert scores.relative_gap() == pytest.approx(2 / 3)
    assert ClassScores((0.0, 0.0)).relative_gap() == 0.0
    assert top_two_gap(np.array([1.0, 4.0, 2.0]))[0] == 1
    with pytest.raises(ValueError):
        ClassScores((-1.0, 1.0))


def test_estimators(toy_dataset):
    knn = KnnClassifier(3).fit(toy_dataset)
    kde = KdeClassifier(0.25).fit(toy_dataset)
    Q = np.array([[0.1, 0.1], [0.9, 0.9]])
    assert knn.predict(Q).tolist() == [0, 1]
    assert kde.predict(Q).tolist() == [0, 1]
    assert kde.describe() == "sigma=0.25"
    assert make_classifier('kde', sigma=0.25, kernel='logistic').describe() == "kernel=logistic;sigma=0.25"
    with pytest.raises(RuntimeError):
        KnnClassifier(1).predict(Q)
    with pytest.raises(ValueError):
        make_classifier('svm')
