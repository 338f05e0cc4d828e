import os
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv

# Загружаем переменные окружения
load_dotenv()


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        return default


class Config:
    # --- Пути ---
    BASE_DIR = Path(__file__).resolve().parent.parent
    DATA_DIR = Path(os.getenv("PKDE_DATA_DIR", BASE_DIR / "data"))
    REPORTS_DIR = DATA_DIR / "reports"
    DB_DIR = DATA_DIR / "database"
    LOG_DIR = BASE_DIR / "logs"

    DB_PATH = DB_DIR / "private_kde.db"
    LOG_FILE = LOG_DIR / "private_kde.log"

    # --- Логирование ---
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

    # --- Paillier ---
    KEY_BITS = _env_int("PKDE_KEY_BITS", 3072)
    MIN_KEY_BITS = 1024

    # Seed по умолчанию для воспроизводимых запусков (None = криптостойкий RNG)
    DEFAULT_SEED = _env_int("PKDE_SEED", None)

    # --- Фиксированная точка (квантование ядра) ---
    # s=12 -> признаки в [0, 4096]; F=F'=1024 хватает для m <= 30 при sigma=0.25
    FIXED_POINT = {
        "feature_bits": 12,
        "kernel_bits": 1024,
        "correction_bits": 1024,
        "lambda_gc": 40,
        "sigma": 0.25,
        "max_tuples": 2 ** 20,
    }

    # Урезанные параметры для ключей 1024-2048 бит (тесты, демо, бенчмарк)
    FIXED_POINT_REDUCED = {
        "feature_bits": 8,
        "kernel_bits": 192,
        "correction_bits": 192,
        "lambda_gc": 40,
        "max_tuples": 2 ** 10,
    }

    # --- Протокол (DH <-> CSP) ---
    PROTOCOL_CONFIG = {
        "transport": "inprocess",   # 'inprocess' или 'tcp'
        "host": "127.0.0.1",
        "port": 0,                  # 0 = свободный порт
        "connect_retries": 5,
        "socket_timeout": 60.0,
        "ot_security_bits": 128,    # число базовых OT для расширения
    }

    # --- Атаки ---
    ATTACK_CONFIG = {
        "epsilon": 2 ** -20,        # точность бинарного поиска расстояния
        "filler_fraction": 0.25,    # filler на расстоянии epsilon * 0.25 от q
        "probe_offset": 0.05,       # смещение проб для триангуляции
        "max_probe_retries": 6,     # сколько раз уменьшаем смещение вдвое
        "residual_tolerance": 1e-6,
        "max_oracle_calls": 100_000,
        # сужение без удаления: пробы на probe_factor * R, R уменьшается в 1/narrowing_shrink раз;
        # нужно probe_factor * (1 - 2 * shrink) > 1 + 2 * shrink
        "probe_factor": 4.0,
        "narrowing_shrink": 0.25,
    }

    # --- Эксперименты (сравнение k-NN и KDE) ---
    EXPERIMENT_DEFAULTS = {
        "test_fraction": 0.2,
        "folds": 5,
        "k_grid": [1, 3, 5, 7, 9, 11, 15],
        "sigma_grid": [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5],
        "max_dropped_fraction": 0.25,
        "protocol_queries": 5,
    }

    # Наборы данных из UCI / MNIST (файлы пользователь кладет сам)
    DATASET_PRESETS = {
        "cancer1": {
            "file": "breast-cancer-wisconsin.data",
            "header": False,
            "label_column": 10,
            "drop_columns": [0],
            "na_values": ["?"],
        },
        "cancer2": {
            "file": "wdbc.data",
            "header": False,
            "label_column": 1,
            "drop_columns": [0],
            "na_values": ["?"],
        },
        "diabetes": {
            "file": "pima-indians-diabetes.csv",
            "header": False,
            "label_column": 8,
            "drop_columns": [],
            "na_values": ["?"],
        },
        "mnist": {
            "file": "mnist_subset.csv",
            "header": True,
            "label_column": "label",
            "drop_columns": [],
            "na_values": [],
            "max_train": 2000,
            "max_test": 500,
            "k": 5,
            "sigma": 0.25,
        },
    }

    @classmethod
    def setup_directories(cls):
        """Создает необходимую структуру директорий"""
        directories = [cls.DATA_DIR, cls.REPORTS_DIR, cls.DB_DIR, cls.LOG_DIR]
        for directory in directories:
            directory.mkdir(parents=True, exist_ok=True)
