import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from config.settings import Config
from src.classifier.dataset import Dataset
from src.crypto.fixedpoint import FixedPointParams
from src.crypto.paillier import keygen
from src.utils.rng import RandomSource

TEST_KEY_BITS = 1024
TEST_SEED = 20240531


def reduced_params(m: int = 2, c: int = 2, **overrides) -> FixedPointParams:
    """Параметры квантования, совместимые с 1024-битным ключом"""
    values = dict(Config.FIXED_POINT_REDUCED, sigma=0.25)
    values.update(overrides)
    return FixedPointParams(m=m, c=c, key_bits=TEST_KEY_BITS, **values)


@pytest.fixture
def rng():
    return RandomSource(TEST_SEED)


@pytest.fixture(scope="session")
def keypair():
    return keygen(TEST_KEY_BITS, seed=TEST_SEED)


@pytest.fixture(scope="session")
def pk(keypair):
    return keypair[0]


@pytest.fixture(scope="session")
def sk(keypair):
    return keypair[1]


@pytest.fixture
def params():
    return reduced_params()


@pytest.fixture
def toy_dataset():
    """Признаки кратны 1/8: квантование при s=8 точное"""
    X = np.array([
        [0.125, 0.125], [0.25, 0.125], [0.125, 0.25],
        [0.75, 0.75], [0.875, 0.75], [0.75, 0.875],
    ])
    return Dataset(X, [0, 0, 0, 1, 1, 1], 2)


@pytest.fixture
def three_class_dataset():
    X = np.array([
        [0.125, 0.125], [0.25, 0.125],
        [0.875, 0.125], [0.75, 0.25],
        [0.5, 0.875], [0.5, 0.75],
    ])
    return Dataset(X, [0, 0, 1, 1, 2, 2], 3)
