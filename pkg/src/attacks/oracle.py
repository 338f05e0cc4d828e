"""
Оракулы для атак в модели DO-Q: атакующий может добавлять и удалять свои кортежи
и отправлять запросы, но никогда не видит координат скрытых кортежей.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import Config
from src.classifier.dataset import ClassScores, DataTuple, Dataset
from src.classifier.kde import kde_classify, kde_scores
from src.classifier.knn import knn_classify_all, knn_classify_majority, knn_neighbors
from src.utils.errors import AttackError, DimensionMismatchError, OracleExhaustedError


class OracleMode(Enum):
    RETURN_ALL_LABELS = "all_labels"        # метки всех k соседей
    MAJORITY_ONLY = "majority"              # только итоговый класс
    WITH_PLAINTEXT_DISTANCE = "plaintext"   # класс и расстояние до ближайшего (сломанная схема)


@dataclass
class OracleCounters:
    queries: int = 0
    inserts: int = 0
    deletes: int = 0

    @property
    def total(self) -> int:
        return self.queries + self.inserts + self.deletes

    def snapshot(self) -> "OracleCounters":
        return OracleCounters(self.queries, self.inserts, self.deletes)


OracleOutput = Union[int, Tuple[int, ...], Tuple[int, float]]


class _InsertableOracle:
    """Скрытый набор данных плюс кортежи атакующего (добавляются в конец)"""

    def __init__(self, data: Dataset, deletion_allowed: bool = True, max_calls: Optional[int] = None):
        self._hidden = data
        self._attacker: Dict[int, DataTuple] = {}
        self._next_handle = 0
        self._cache: Optional[Dataset] = None
        self.deletion_allowed = deletion_allowed
        self.max_calls = max_calls or Config.ATTACK_CONFIG['max_oracle_calls']
        self.counters = OracleCounters()

    @property
    def m(self) -> int:
        return self._hidden.m

    @property
    def n_classes(self) -> int:
        return self._hidden.c

    @property
    def remaining_calls(self) -> int:
        return max(self.max_calls - self.counters.total, 0)

    def _charge(self):
        if self.counters.total >= self.max_calls:
            raise OracleExhaustedError(f"Исчерпан лимит обращений к оракулу ({self.max_calls})")

    def insert(self, features: Sequence[float], label: int) -> int:
        """Добавление кортежа атакующего; возвращает его дескриптор"""
        self._charge()
        t = DataTuple(tuple(features), int(label))
        if t.m != self.m:
            raise DimensionMismatchError(f"Кортеж размерности {t.m}, ожидалось {self.m}")
        if not 0 <= t.label < self.n_classes:
            raise AttackError(f"Класс {t.label} вне [0, {self.n_classes})")
        handle = self._next_handle
        self._next_handle += 1
        self._attacker[handle] = t
        self._cache = None
        self.counters.inserts += 1
        return handle

    def delete(self, handle: int):
        if not self.deletion_allowed:
            raise AttackError("Оракул не разрешает удаление")
        if handle not in self._attacker:
            raise AttackError(f"Нет кортежа атакующего с дескриптором {handle}")
        self._charge()
        del self._attacker[handle]
        self._cache = None
        self.counters.deletes += 1

    def _current(self) -> Dataset:
        if self._cache is None:
            data = self._hidden
            if self._attacker:
                extra = list(self._attacker.values())
                X = np.vstack([data.X, np.array([t.features for t in extra])])
                y = np.concatenate([data.y, [t.label for t in extra]])
                data = Dataset(X, y, data.c, class_weights=data.class_weights, m=data.m)
            self._cache = data
        return self._cache

    def query(self, q: Sequence[float]) -> OracleOutput:
        self._charge()
        self.counters.queries += 1
        return self._answer(self._current(), np.asarray(q, dtype=float))

    def _answer(self, data: Dataset, q: np.ndarray) -> OracleOutput:
        raise NotImplementedError

    def attacker_view(self) -> "OracleView":
        return OracleView(self)


class KnnOracle(_InsertableOracle):
    """Точный k-NN на скрытых данных плюс кортежах атакующего"""

    def __init__(self, data: Dataset, k: int = 1, mode: OracleMode = OracleMode.RETURN_ALL_LABELS,
                 deletion_allowed: bool = True, max_calls: Optional[int] = None):
        super().__init__(data, deletion_allowed, max_calls)
        if k < 1:
            raise ValueError("k должно быть >= 1")
        self.k = k
        self.mode = OracleMode(mode)

    def _answer(self, data: Dataset, q: np.ndarray) -> OracleOutput:
        k = min(self.k, len(data))
        if self.mode is OracleMode.RETURN_ALL_LABELS:
            return knn_classify_all(data, q, k)
        if self.mode is OracleMode.MAJORITY_ONLY:
            return knn_classify_majority(data, q, k)
        idx, dist = knn_neighbors(data, q, 1)[0]
        return int(data.y[idx]), dist


class KdeOracle(_InsertableOracle):
    """Те же возможности атакующего поверх гауссовой KDE-классификации"""
    mode = OracleMode.MAJORITY_ONLY
    k = 1

    def __init__(self, data: Dataset, sigma: float, kernel: str = 'gaussian',
                 deletion_allowed: bool = True, max_calls: Optional[int] = None):
        super().__init__(data, deletion_allowed, max_calls)
        self.sigma = sigma
        self.kernel = kernel

    def _answer(self, data: Dataset, q: np.ndarray) -> OracleOutput:
        return kde_classify(data, q, self.sigma, self.kernel)


class ScoreLeakingKde(_InsertableOracle):
    """
    Гипотетическая сломанная система: отдает сырые суммы ядер по классам.
    Кортеж жертвы добавляется через victim_insert (атакующий его не видит).
    """
    mode = OracleMode.MAJORITY_ONLY
    k = 1

    def __init__(self, data: Dataset, sigma: float, max_calls: Optional[int] = None):
        super().__init__(data, deletion_allowed=False, max_calls=max_calls)
        self.sigma = sigma

    def scores(self, q: Sequence[float]) -> ClassScores:
        self._charge()
        self.counters.queries += 1
        return kde_scores(self._current(), np.asarray(q, dtype=float), self.sigma)

    def _answer(self, data: Dataset, q: np.ndarray) -> OracleOutput:
        return kde_scores(data, q, self.sigma).argmax()

    def victim_insert(self, t: DataTuple):
        if t.m != self.m:
            raise DimensionMismatchError(f"Кортеж размерности {t.m}, ожидалось {self.m}")
        self._hidden = self._hidden.with_tuple(t)
        self._cache = None


class OracleView:
    """То, что видит атакующий: интерфейс оракула без доступа к скрытым данным"""
    __slots__ = ('_oracle',)

    def __init__(self, oracle: _InsertableOracle):
        self._oracle = oracle

    @property
    def m(self) -> int:
        return self._oracle.m

    @property
    def n_classes(self) -> int:
        return self._oracle.n_classes

    @property
    def k(self) -> int:
        return self._oracle.k

    @property
    def mode(self) -> OracleMode:
        return self._oracle.mode

    @property
    def deletion_allowed(self) -> bool:
        return self._oracle.deletion_allowed

    @property
    def counters(self) -> OracleCounters:
        return self._oracle.counters.snapshot()

    @property
    def remaining_calls(self) -> int:
        return self._oracle.remaining_calls

    def insert(self, features: Sequence[float], label: int) -> int:
        return self._oracle.insert(features, label)

    def delete(self, handle: int):
        self._oracle.delete(handle)

    def query(self, q: Sequence[float]) -> OracleOutput:
        return self._oracle.query(q)

    def scores(self, q: Sequence[float]) -> ClassScores:
        if not isinstance(self._oracle, ScoreLeakingKde):
            raise AttackError("Оракул не раскрывает суммы ядер")
        return self._oracle.scores(q)
