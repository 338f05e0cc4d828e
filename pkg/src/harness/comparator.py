"""
Сравнение k-NN и KDE на одном разбиении: точность каждого алгоритма и
доля совпадающих предсказаний с первым алгоритмом из списка.
"""
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from config.settings import Config
from src.classifier.dataset import ClassScores, Dataset
from src.classifier.estimators import make_classifier
from src.classifier.kde import kde_scores_batch
from src.crypto.fixedpoint import FixedPointParams
from src.harness.cross_validation import GRID_PARAMS, cross_validate
from src.harness.data_loader import LoadedData
from src.harness.experiment_config import ExperimentConfig
from src.protocol.session import ProtocolSession, SessionConfig
from src.utils.logger import logger

REPORT_COLUMNS = ['dataset', 'algo', 'accuracy_pct', 'agreement_pct', 'n_train', 'n_test', 'params']

# Запросы с относительным разрывом оценок ниже порога не входят в сверку с протоколом
PROTOCOL_GAP_THRESHOLD = 2.0 ** -50


@dataclass
class AlgorithmResult:
    algo: str
    params: Dict
    predictions: np.ndarray
    accuracy_pct: float
    agreement_pct: float = 100.0

    def describe_params(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))


@dataclass
class ProtocolCheck:
    """Сверка зашифрованного протокола с открытым KDE на части тестовых запросов"""
    queries: int
    excluded: int
    accuracy_pct: float
    agreement_pct: float
    params: Dict


@dataclass
class ComparisonReport:
    dataset: str
    n_train: int
    n_test: int
    results: List[AlgorithmResult]
    protocol: Optional[ProtocolCheck] = None
    # секунды по этапам; в таблицы не попадают, иначе отчеты не воспроизводимы
    runtime: Dict[str, float] = field(default_factory=dict)

    def result(self, algo: str) -> AlgorithmResult:
        for r in self.results:
            if r.algo == algo:
                return r
        raise KeyError(algo)

    def to_frame(self) -> pd.DataFrame:
        rows = [{
            'dataset': self.dataset, 'algo': r.algo,
            'accuracy_pct': round(r.accuracy_pct, 2), 'agreement_pct': round(r.agreement_pct, 2),
            'n_train': self.n_train, 'n_test': self.n_test, 'params': r.describe_params(),
        } for r in self.results]
        if self.protocol is not None:
            p = self.protocol
            rows.append({
                'dataset': self.dataset, 'algo': 'kde-protocol',
                'accuracy_pct': round(p.accuracy_pct, 2), 'agreement_pct': round(p.agreement_pct, 2),
                'n_train': self.n_train, 'n_test': p.queries,
                'params': ";".join(f"{k}={v}" for k, v in sorted(p.params.items())),
            })
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def agreement_pct(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0:
        return 100.0
    return 100.0 * float(np.mean(np.asarray(a) == np.asarray(b)))


def accuracy_pct(predictions: np.ndarray, y: np.ndarray) -> float:
    if len(y) == 0:
        return 0.0
    return 100.0 * float(np.mean(np.asarray(predictions) == np.asarray(y)))


def select_params(train: Dataset, algo: str, config: ExperimentConfig,
                  preset: Optional[Dict] = None) -> Dict:
    """Явные k / sigma из конфига или пресета, иначе перебор по сетке с кросс-валидацией"""
    param = GRID_PARAMS[algo]
    explicit = getattr(config, param)
    if explicit is None and preset:
        explicit = preset.get(param)
    if explicit is not None:
        return {param: int(explicit) if param == 'k' else float(explicit)}

    grid = config.k_grid if param == 'k' else config.sigma_grid
    if param == 'k':
        # k не может превышать размер обучающего фолда
        fold_train = len(train) - int(np.ceil(len(train) / config.folds))
        grid = [k for k in grid if k <= fold_train]
    return cross_validate(train, algo, grid, folds=config.folds, seed=config.seed,
                          kernel=config.kernel).best_params


def _protocol_check(train: Dataset, test: Dataset, sigma: float, config: ExperimentConfig) -> ProtocolCheck:
    if config.kernel != 'gaussian':
        raise ValueError("Зашифрованный протокол поддерживает только гауссово ядро")
    queries = test.subset(np.arange(min(config.protocol_queries, len(test))))
    key_bits = config.key_bits or Config.KEY_BITS
    base = {} if key_bits >= Config.KEY_BITS else dict(Config.FIXED_POINT_REDUCED)
    params = FixedPointParams.for_key(key_bits, train.m, train.c, **{**base, 'sigma': sigma, **config.fixed_point})

    plain = kde_scores_batch(train, queries.X, sigma)
    kept_labels, kept_plain, kept_truth, excluded = [], [], [], 0

    logger.info(f"🔐 Прогон протокола: {len(queries)} запросов, n={len(train)}, ключ {key_bits} бит")
    session_cfg = SessionConfig(params=params, key_bits=key_bits, seed=config.seed)
    with ProtocolSession(session_cfg) as session:
        session.outsource(train)
        for i in range(len(queries)):
            scores = ClassScores(tuple(plain[i]))
            if scores.relative_gap() < PROTOCOL_GAP_THRESHOLD:
                excluded += 1
                continue
            kept_labels.append(session.query(queries.X[i]))
            kept_plain.append(scores.argmax())
            kept_truth.append(int(queries.y[i]))

    if excluded:
        logger.warning(f"⚠️ {excluded} запросов с почти равными оценками исключены из сверки с протоколом")
    return ProtocolCheck(
        queries=len(kept_labels), excluded=excluded,
        accuracy_pct=accuracy_pct(kept_labels, kept_truth),
        agreement_pct=agreement_pct(kept_labels, kept_plain),
        params={'sigma': sigma, 'key_bits': key_bits, 'excluded': excluded},
    )


def compare(data: LoadedData, config: ExperimentConfig, name: Optional[str] = None) -> ComparisonReport:
    """
    Обучение на train, предсказания всех алгоритмов на одном и том же test.
    Совпадение считается относительно первого алгоритма в config.algorithms.
    """
    name = name or config.dataset or "dataset"
    preset = Config.DATASET_PRESETS.get(config.dataset) if config.dataset else None
    train, test = data.train, data.test
    logger.info(f"⚖️ Сравнение {', '.join(config.algorithms)} на {name}: train={len(train)}, test={len(test)}")

    runtime: Dict[str, float] = {}
    results: List[AlgorithmResult] = []
    for algo in config.algorithms:
        started = time.perf_counter()
        params = select_params(train, algo, config, preset)
        extra = {'kernel': config.kernel} if algo == 'kde' else {}
        model = make_classifier(algo, **params, **extra).fit(train)
        predictions = model.predict(test.X) if len(test) else np.zeros(0, dtype=np.int64)
        runtime[algo] = time.perf_counter() - started
        results.append(AlgorithmResult(algo, model.params, predictions, accuracy_pct(predictions, test.y)))
        logger.info(f"   {algo} ({model.describe()}): точность {results[-1].accuracy_pct:.2f}%")

    reference = results[0].predictions
    for r in results:
        r.agreement_pct = agreement_pct(r.predictions, reference)

    protocol = None
    if config.protocol:
        kde = next((r for r in results if r.algo == 'kde'), None)
        if kde is None:
            raise ValueError("Сверка с протоколом требует алгоритм kde в списке")
        started = time.perf_counter()
        protocol = _protocol_check(train, test, kde.params['sigma'], config)
        runtime['protocol'] = time.perf_counter() - started

    return ComparisonReport(name, len(train), len(test), results, protocol, runtime)
