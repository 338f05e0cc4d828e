import math

import numpy as np
import pytest
from scipy import stats

from src.classifier.dataset import ClassScores, DataTuple
from src.classifier.kernels import gaussian_peak
from src.privacy.dp import (
    DpParams, dp_classify, laplace_noise, laplace_perturb, privacy_loss_bound,
    score_l1_change, sensitivity,
)
from src.utils.rng import RandomSource


def test_sensitivity_is_kernel_peak():
    assert sensitivity(0.25) == pytest.approx(gaussian_peak(0.25))
    with pytest.raises(ValueError):
        sensitivity(0.0)


def test_epsilon_relation():
    params = DpParams.for_epsilon(0.5, sigma=0.25)
    assert params.epsilon == pytest.approx(0.5)
    assert params.lam == pytest.approx(sensitivity(0.25) / 0.5)
    assert privacy_loss_bound(params) == pytest.approx(math.exp(0.5))
    with pytest.raises(ValueError):
        DpParams(lam=0.0, sigma=0.25)


def test_laplace_noise_distribution():
    noise = laplace_noise(2.0, 20000, RandomSource(11))
    assert abs(np.mean(noise)) < 0.1
    assert np.mean(np.abs(noise)) == pytest.approx(2.0, rel=0.05)
    _, p_value = stats.kstest(noise, stats.laplace(scale=2.0).cdf)
    assert p_value > 1e-4


def test_seeded_source_gives_fresh_noise_per_call():
    rng = RandomSource(5)
    assert not np.array_equal(laplace_noise(1.0, 4, rng), laplace_noise(1.0, 4, rng))


def test_perturb_keeps_shape_and_allows_negative():
    noisy = laplace_perturb(ClassScores((0.0, 0.0, 0.0)), 5.0, np.random.default_rng(1))
    assert noisy.shape == (3,)
    assert np.any(noisy != 0.0)


def test_neighbouring_datasets_within_sensitivity(toy_dataset):
    neighbor = toy_dataset.with_tuple(DataTuple((0.5, 0.5), 1))
    for q in ([0.5, 0.5], [0.1, 0.9], [0.0, 0.0]):
        assert score_l1_change(toy_dataset, neighbor, q, 0.25) <= sensitivity(0.25) + 1e-12


def test_dp_classify_tiny_noise_matches_plain(toy_dataset):
    rng = RandomSource(3)
    assert dp_classify(toy_dataset, [0.1, 0.1], 0.25, 1e-9, rng) == 0
    assert dp_classify(toy_dataset, [0.9, 0.9], 0.25, 1e-9, rng) == 1


def test_output_ratio_bounded_by_privacy_loss(toy_dataset):
    """Частоты исходов на соседних наборах отличаются не более чем в e^epsilon раз"""
    sigma = 0.25
    params = DpParams.for_epsilon(1.0, sigma)
    neighbor = toy_dataset.with_tuple(DataTuple((0.5, 0.5), 1))
    q = [0.5, 0.5]
    gen = np.random.default_rng(42)
    trials = 4000
    a = np.mean([dp_classify(toy_dataset, q, sigma, params.lam, gen) for _ in range(trials)])
    b = np.mean([dp_classify(neighbor, q, sigma, params.lam, gen) for _ in range(trials)])
    bound = privacy_loss_bound(params)
    # допуск на выборочную ошибку
    assert a <= bound * b + 0.05
    assert b <= bound * a + 0.05
