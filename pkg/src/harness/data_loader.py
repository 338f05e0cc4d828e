"""
Загрузка наборов данных из CSV: пропуски, метки, стратифицированное разбиение,
min-max масштабирование по статистикам обучающей части.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from config.settings import Config
from src.classifier.dataset import Dataset
from src.utils.errors import MalformedDataError
from src.utils.logger import logger


@dataclass
class DatasetSchema:
    label_column: Union[int, str] = -1
    header: bool = False
    drop_columns: List[Union[int, str]] = field(default_factory=list)
    na_values: List[str] = field(default_factory=lambda: ['?'])
    max_train: Optional[int] = None
    max_test: Optional[int] = None

    @classmethod
    def from_preset(cls, name: str) -> "DatasetSchema":
        try:
            preset = Config.DATASET_PRESETS[name]
        except KeyError:
            raise MalformedDataError(f"Неизвестный набор данных '{name}', доступны: {sorted(Config.DATASET_PRESETS)}")
        return cls(label_column=preset['label_column'], header=preset['header'],
                   drop_columns=list(preset.get('drop_columns', [])),
                   na_values=list(preset.get('na_values', [])),
                   max_train=preset.get('max_train'), max_test=preset.get('max_test'))


@dataclass
class MinMaxScaler:
    """Масштаб в [0, 1]; признак нулевого размаха переходит в 0"""
    mins: np.ndarray
    ranges: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "MinMaxScaler":
        X = np.asarray(X, dtype=float)
        if len(X) == 0:
            raise MalformedDataError("Нечего масштабировать: обучающая часть пуста")
        mins = X.min(axis=0)
        return cls(mins, X.max(axis=0) - mins)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        safe = np.where(self.ranges > 0, self.ranges, 1.0)
        scaled = np.where(self.ranges > 0, (X - self.mins) / safe, 0.0)
        # тестовые значения вне обучающего диапазона прижимаются к границам
        return np.clip(scaled, 0.0, 1.0)


@dataclass
class LoadedData:
    train: Dataset
    test: Dataset
    dropped_rows: int
    scaler: Optional[MinMaxScaler]
    label_values: List


def read_table(path: Union[str, Path], schema: DatasetSchema) -> tuple:
    """(признаки, исходные метки, число отброшенных строк)"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл набора данных не найден: {path}")
    df = pd.read_csv(path, header=0 if schema.header else None, na_values=schema.na_values,
                     skipinitialspace=True, float_precision='round_trip')
    if df.empty:
        raise MalformedDataError(f"{path.name}: файл пуст")

    def resolve(col):
        if isinstance(col, str):
            if col not in df.columns:
                raise MalformedDataError(f"Нет колонки '{col}'")
            return col
        try:
            return df.columns[col]
        except IndexError:
            raise MalformedDataError(f"Нет колонки с номером {col} (всего {len(df.columns)})")

    label_col = resolve(schema.label_column)
    drop = {resolve(c) for c in schema.drop_columns}
    feature_cols = [c for c in df.columns if c != label_col and c not in drop]
    if not feature_cols:
        raise MalformedDataError("Нет колонок признаков")

    total = len(df)
    df = df.dropna(subset=feature_cols + [label_col])
    dropped = total - len(df)
    max_dropped = Config.EXPERIMENT_DEFAULTS['max_dropped_fraction']
    if dropped:
        logger.warning(f"⚠️ {path.name}: отброшено {dropped} строк с пропусками из {total}")
    if dropped > max_dropped * total:
        raise MalformedDataError(f"{path.name}: строк с пропусками {dropped} из {total}, больше допустимого")

    features = df[feature_cols].apply(pd.to_numeric, errors='coerce')
    if features.isna().any().any():
        bad = features.columns[features.isna().any()].tolist()
        raise MalformedDataError(f"{path.name}: нечисловые значения в колонках {bad}")
    return features.to_numpy(dtype=float), df[label_col].to_numpy(), dropped


def stratified_split(y: np.ndarray, test_fraction: float, rng: np.random.Generator):
    """Индексы (train, test): по каждому классу round(test_fraction * n_class) в тест"""
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError("test_fraction должна лежать в [0, 1)")
    train_idx, test_idx = [], []
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        rng.shuffle(idx)
        n_test = int(round(test_fraction * len(idx)))
        if n_test >= len(idx) and len(idx) > 1:
            n_test = len(idx) - 1
        test_idx.extend(idx[:n_test])
        train_idx.extend(idx[n_test:])
    return np.sort(np.array(train_idx, dtype=np.int64)), np.sort(np.array(test_idx, dtype=np.int64))


def _limit(idx: np.ndarray, limit: Optional[int], rng: np.random.Generator) -> np.ndarray:
    if limit is None or len(idx) <= limit:
        return idx
    return np.sort(rng.choice(idx, size=limit, replace=False))


def load_csv(path: Union[str, Path], schema: Optional[DatasetSchema] = None,
             test_fraction: Optional[float] = None, seed: Optional[int] = None,
             scale: bool = True) -> LoadedData:
    schema = schema or DatasetSchema()
    test_fraction = Config.EXPERIMENT_DEFAULTS['test_fraction'] if test_fraction is None else test_fraction
    X, raw_labels, dropped = read_table(path, schema)

    label_values = sorted(pd.unique(raw_labels).tolist())
    mapping = {v: i for i, v in enumerate(label_values)}
    y = np.array([mapping[v] for v in raw_labels], dtype=np.int64)
    c = len(label_values)

    rng = np.random.default_rng(seed)
    train_idx, test_idx = stratified_split(y, test_fraction, rng)
    train_idx = _limit(train_idx, schema.max_train, rng)
    test_idx = _limit(test_idx, schema.max_test, rng)

    scaler = MinMaxScaler.fit(X[train_idx]) if scale else None
    if scaler is not None:
        X = scaler.transform(X)

    m = X.shape[1]
    train = Dataset(X[train_idx], y[train_idx], c, m=m)
    test = Dataset(X[test_idx], y[test_idx], c, m=m)
    logger.info(f"📥 {Path(path).name}: train={len(train)}, test={len(test)}, m={m}, c={c}")
    return LoadedData(train, test, dropped, scaler, label_values)


def load_preset(name: str, data_dir: Optional[Path] = None, seed: Optional[int] = None,
                test_fraction: Optional[float] = None) -> LoadedData:
    schema = DatasetSchema.from_preset(name)
    path = Path(data_dir or Config.DATA_DIR) / Config.DATASET_PRESETS[name]['file']
    return load_csv(path, schema, test_fraction, seed)


def write_csv(dataset: Dataset, path: Union[str, Path]) -> Path:
    """CSV с заголовком f0..f{m-1},label"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_frame().to_csv(path, index=False, float_format='%.17g')
    return path
