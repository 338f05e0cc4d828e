"""
Атака на обучение расстояний: поиск расстояния от запроса до ближайшего скрытого кортежа
вставкой кортежей-догадок, сведение k-NN к 1-NN и восстановление кортежа триангуляцией.
"""
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import Config
from src.attacks.geometry import triangulate, triangulate_with_residual
from src.attacks.oracle import OracleMode
from src.utils.errors import (
    AttackError, InconsistentRadiiError, NoDistanceSignal, OracleExhaustedError, ProbeStraddleError,
    SearchBoundError, UnsupportedReductionError,
)
from src.utils.logger import logger


@dataclass
class AttackResult:
    recovered_point: np.ndarray
    queries_used: int
    inserts_used: int
    mode: str
    distances: List[float] = field(default_factory=list)
    residual_offset: float = 0.0
    true_error: Optional[float] = None

    def with_truth(self, target: Sequence[float]) -> "AttackResult":
        """Ошибка относительно истинного кортежа (считает тестовый стенд, не атакующий)"""
        error = float(np.linalg.norm(np.asarray(target, dtype=float) - self.recovered_point))
        return replace(self, true_error=error)


def _labels(output, mode: OracleMode) -> Tuple[int, ...]:
    if mode is OracleMode.WITH_PLAINTEXT_DISTANCE:
        return (int(output[0]),)
    if isinstance(output, tuple):
        return tuple(int(v) for v in output)
    return (int(output),)


def _random_direction(m: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        u = rng.standard_normal(m)
        norm = np.linalg.norm(u)
        if norm > 1e-12:
            return u / norm


@dataclass
class OneNnView:
    """
    Сигнал 1-NN поверх оракула: цель "побеждает", если число меток класса догадки
    в ответе равно числу заполнителей этого класса (догадка не попала в решающую позицию).
    """
    oracle: object
    q: np.ndarray
    target_class: int
    guess_class: int
    baseline_guess_count: int = 0
    filler_handles: List[int] = field(default_factory=list)

    def target_wins(self, output) -> bool:
        return _labels(output, self.oracle.mode).count(self.guess_class) == self.baseline_guess_count

    def release(self):
        if self.oracle.deletion_allowed:
            for handle in self.filler_handles:
                self.oracle.delete(handle)
        self.filler_handles = []


def _insert_fillers(oracle, q: np.ndarray, classes: Sequence[int], epsilon: float,
                    rng: np.random.Generator) -> List[int]:
    distance = epsilon * Config.ATTACK_CONFIG['filler_fraction']
    return [oracle.insert(q + distance * _random_direction(len(q), rng), label) for label in classes]


def reduce_knn_to_1nn(oracle, q: Sequence[float], epsilon: Optional[float] = None,
                      rng: Optional[np.random.Generator] = None, filler_class: int = 0) -> OneNnView:
    """
    Оракул со всеми метками: k-1 заполнителей класса C' рядом с q,
    тогда k-я позиция занята ближайшим из (цель, догадка).
    """
    epsilon = epsilon or Config.ATTACK_CONFIG['epsilon']
    rng = rng or np.random.default_rng()
    q = np.asarray(q, dtype=float)
    k, c = oracle.k, oracle.n_classes
    if c < 2:
        raise UnsupportedReductionError("Для атаки нужно не меньше двух классов")

    handles = _insert_fillers(oracle, q, [filler_class] * (k - 1), epsilon, rng)
    labels = list(_labels(oracle.query(q), oracle.mode))
    for _ in range(k - 1):
        if filler_class not in labels:
            raise AttackError("Заполнители оказались не ближе цели")
        labels.remove(filler_class)
    if len(labels) != 1:
        raise AttackError("Ответ оракула не содержит k меток")
    target_class = labels[0]

    if target_class != filler_class:
        return OneNnView(oracle, q, target_class, filler_class, k - 1, handles)
    return OneNnView(oracle, q, target_class, (filler_class + 1) % c, 0, handles)


def reduce_majority_to_1nn(oracle, q: Sequence[float], epsilon: Optional[float] = None,
                           rng: Optional[np.random.Generator] = None) -> OneNnView:
    """
    Оракул большинства: k-1 заполнителей поровну по всем классам,
    тогда итог голосования определяет k-й сосед.
    """
    epsilon = epsilon or Config.ATTACK_CONFIG['epsilon']
    rng = rng or np.random.default_rng()
    q = np.asarray(q, dtype=float)
    k, c = oracle.k, oracle.n_classes
    if c < 2:
        raise UnsupportedReductionError("Для атаки нужно не меньше двух классов")
    if (k - 1) % c:
        raise UnsupportedReductionError(f"k-1={k - 1} не делится поровну на {c} классов")

    fillers = [label for label in range(c) for _ in range((k - 1) // c)]
    handles = _insert_fillers(oracle, q, fillers, epsilon, rng)
    target_class = _labels(oracle.query(q), oracle.mode)[0]
    return OneNnView(oracle, q, target_class, (target_class + 1) % c, 0, handles)


def one_nn_view(oracle, q: Sequence[float], epsilon: Optional[float] = None,
                rng: Optional[np.random.Generator] = None) -> OneNnView:
    if oracle.mode is OracleMode.WITH_PLAINTEXT_DISTANCE:
        raise UnsupportedReductionError("Оракул с расстоянием атакуется без вставок")
    if oracle.k > 1 and oracle.mode is OracleMode.RETURN_ALL_LABELS:
        return reduce_knn_to_1nn(oracle, q, epsilon, rng)
    if oracle.k > 1:
        return reduce_majority_to_1nn(oracle, q, epsilon, rng)
    q = np.asarray(q, dtype=float)
    if oracle.n_classes < 2:
        raise UnsupportedReductionError("Для атаки нужно не меньше двух классов")
    target_class = _labels(oracle.query(q), oracle.mode)[0]
    return OneNnView(oracle, q, target_class, (target_class + 1) % oracle.n_classes)


def attack_distance_1nn(oracle, q: Sequence[float], search_bound: Optional[float] = None,
                        epsilon: Optional[float] = None, view: Optional[OneNnView] = None,
                        rng: Optional[np.random.Generator] = None, validate_signal: bool = True,
                        lower_bound: float = 0.0, direction: Optional[np.ndarray] = None) -> float:
    """
    Расстояние от q до ближайшего скрытого кортежа с точностью epsilon.
    С удалением - бинарный поиск, без удаления - линейный спуск от границы D
    до lower_bound с шагом epsilon (догадка ближе цели блокирует q навсегда).
    """
    epsilon = epsilon or Config.ATTACK_CONFIG['epsilon']
    rng = rng or np.random.default_rng()
    q = np.asarray(q, dtype=float)
    D = search_bound if search_bound is not None else math.sqrt(len(q))
    if not oracle.deletion_allowed:
        needed = 2 * (math.ceil((D - lower_bound) / epsilon) + 2)
        remaining = getattr(oracle, 'remaining_calls', None)
        if remaining is not None and needed > remaining:
            raise OracleExhaustedError(
                f"Линейному спуску нужно до {needed} обращений, доступно {remaining}: "
                f"сузьте интервал поиска")
    view = view or one_nn_view(oracle, q, epsilon, rng)
    direction = _random_direction(len(q), rng) if direction is None else np.asarray(direction, dtype=float)

    def guess(r: float, copies: int = 1) -> bool:
        handles = [oracle.insert(q + r * direction, view.guess_class) for _ in range(copies)]
        won = view.target_wins(oracle.query(q))
        if oracle.deletion_allowed:
            for handle in handles:
                oracle.delete(handle)
        return won

    if not guess(D):
        raise SearchBoundError(f"Цель дальше границы поиска D={D}")

    lo, hi = 0.0, D
    if oracle.deletion_allowed:
        while hi - lo > epsilon:
            mid = (lo + hi) / 2
            if guess(mid):
                hi = mid
            else:
                lo = mid
    else:
        while hi > 0:
            r = max(hi - epsilon, 0.0)
            if not guess(r):
                lo = r
                break
            hi = r
            if hi < lower_bound:
                raise SearchBoundError(f"Цель ближе нижней границы {lower_bound:.3e}")

    # сигнал порядка не зависит от числа одинаковых догадок;
    # без удаления последняя догадка ближе цели остается в данных
    if validate_signal and oracle.deletion_allowed and not guess(hi, copies=2):
        raise NoDistanceSignal("Ответ зависит от числа догадок: сигнала расстояния нет")

    logger.debug(f"Поиск расстояния: интервал {hi - lo:.2e}, запросов {oracle.counters.queries}")
    return (lo + hi) / 2


def _probe_points(center: np.ndarray, offset: float) -> np.ndarray:
    m = len(center)
    return np.vstack([center, center + offset * np.eye(m)])


def _triangulation_tolerance(epsilon: float, search_bound: float, offset: float) -> float:
    return max(Config.ATTACK_CONFIG['residual_tolerance'], 4 * epsilon * (1 + search_bound / offset))


def _simplex_directions(m: int) -> np.ndarray:
    """-(1, ..., 1)/sqrt(m) и e_1..e_m: d+1 единичных направлений в общем положении"""
    return np.vstack([-np.ones(m) / math.sqrt(m), np.eye(m)])


class _TrackedOracle:
    """Оракул плюс координаты всех вставленных атакующим кортежей"""

    def __init__(self, oracle):
        self._oracle = oracle
        self.points: List[np.ndarray] = []

    def __getattr__(self, name):
        return getattr(self._oracle, name)

    def insert(self, features: Sequence[float], label: int) -> int:
        handle = self._oracle.insert(features, label)
        self.points.append(np.asarray(features, dtype=float))
        return handle

    def nearest_own(self, x: np.ndarray) -> float:
        if not self.points:
            return math.inf
        return float(np.min(np.linalg.norm(np.vstack(self.points) - x, axis=1)))


def _recover_by_narrowing(oracle, center: np.ndarray, epsilon: float,
                          search_bound: Optional[float], rng: np.random.Generator) -> AttackResult:
    """
    Без удаления: цель лежит в шаре (оценка, R). Пробы ставятся на расстоянии
    probe_factor * R от оценки, расстояние ищется спуском в [rho - R, rho + R]
    с шагом ~R/F, триангуляция дает новую оценку и R уменьшается в 1/narrowing_shrink раз.
    Догадки уходят наружу от оценки, поэтому оставшиеся в данных кортежи
    дальше от следующих проб, чем цель.
    """
    cfg = Config.ATTACK_CONFIG
    factor, shrink = cfg['probe_factor'], cfg['narrowing_shrink']
    m = len(center)
    tracked = _TrackedOracle(oracle)
    start = oracle.counters.snapshot()
    directions = _simplex_directions(m)
    estimate = center
    radius = search_bound if search_bound is not None else math.sqrt(m)
    probes, distances, rho = None, [], 0.0

    while radius > epsilon:
        rho = factor * radius
        step = shrink * radius / (4 * math.sqrt(m))
        upper, lower = rho + radius, rho - radius
        probes = estimate + rho * directions
        distances = []
        for probe, u in zip(probes, directions):
            if tracked.nearest_own(probe) <= upper:
                raise ProbeStraddleError("Собственные догадки ближе к пробе, чем граница поиска")
            view = one_nn_view(tracked, probe, epsilon, rng)
            distances.append(attack_distance_1nn(tracked, probe, upper, step, view, rng,
                                                 validate_signal=False, lower_bound=lower, direction=u))
        point, residual = triangulate_with_residual(probes, distances)
        if residual > 2 * math.sqrt(m) * step + cfg['residual_tolerance']:
            raise ProbeStraddleError(f"Расстояния несовместны: невязка {residual:.3e}")
        estimate, radius = point, radius * shrink
        logger.debug(f"Сужение: R={radius:.3e}, запросов {oracle.counters.queries - start.queries}")

    used = oracle.counters
    logger.info(f"🎯 Кортеж восстановлен без удаления: запросов {used.queries - start.queries}, "
                f"вставок {used.inserts - start.inserts}")
    return AttackResult(estimate, used.queries - start.queries, used.inserts - start.inserts,
                        oracle.mode.value, distances, rho)


def attack_recover_tuple(oracle, center: Sequence[float], offset: Optional[float] = None,
                         epsilon: Optional[float] = None, search_bound: Optional[float] = None,
                         rng: Optional[np.random.Generator] = None) -> AttackResult:
    """
    d+1 поисков расстояния из пробных точек около center и триангуляция.
    При разных ближайших кортежах у проб смещение уменьшается вдвое.
    Без удаления - последовательное сужение шара вокруг оценки.
    """
    if oracle.mode is OracleMode.WITH_PLAINTEXT_DISTANCE:
        return attack_plaintext_distance(oracle, center, offset)

    cfg = Config.ATTACK_CONFIG
    epsilon = epsilon or cfg['epsilon']
    offset = offset or cfg['probe_offset']
    rng = rng or np.random.default_rng()
    center = np.asarray(center, dtype=float)
    if not oracle.deletion_allowed:
        return _recover_by_narrowing(oracle, center, epsilon, search_bound, rng)
    start = oracle.counters.snapshot()

    for attempt in range(cfg['max_probe_retries'] + 1):
        probes = _probe_points(center, offset)
        D = search_bound if search_bound is not None else math.sqrt(len(center)) + offset
        distances, classes = [], set()
        for probe in probes:
            view = one_nn_view(oracle, probe, epsilon, rng)
            try:
                distances.append(attack_distance_1nn(oracle, probe, D, epsilon, view, rng))
            finally:
                view.release()
            classes.add(view.target_class)

        if len(classes) == 1:
            try:
                point = triangulate(probes, distances, _triangulation_tolerance(epsilon, D, offset))
            except InconsistentRadiiError as e:
                logger.debug(f"Попытка {attempt + 1}: {e}")
            else:
                used = oracle.counters
                logger.info(f"🎯 Кортеж восстановлен: запросов {used.queries - start.queries}, "
                            f"вставок {used.inserts - start.inserts}")
                return AttackResult(point, used.queries - start.queries, used.inserts - start.inserts,
                                    oracle.mode.value, distances, offset)
        offset /= 2

    raise ProbeStraddleError("Пробы попадают в разные ячейки Вороного")


def attack_plaintext_distance(oracle, center: Sequence[float], offset: Optional[float] = None) -> AttackResult:
    """Сломанная схема, раскрывающая расстояние: d+1 запросов, ноль вставок"""
    if oracle.mode is not OracleMode.WITH_PLAINTEXT_DISTANCE:
        raise UnsupportedReductionError("Оракул не раскрывает расстояние")
    cfg = Config.ATTACK_CONFIG
    offset = offset or cfg['probe_offset']
    center = np.asarray(center, dtype=float)
    start = oracle.counters.snapshot()

    for _ in range(cfg['max_probe_retries'] + 1):
        probes = _probe_points(center, offset)
        answers = [oracle.query(p) for p in probes]
        if len({label for label, _ in answers}) == 1:
            distances = [float(d) for _, d in answers]
            try:
                point = triangulate(probes, distances)
            except InconsistentRadiiError:
                pass
            else:
                used = oracle.counters
                return AttackResult(point, used.queries - start.queries, used.inserts - start.inserts,
                                    oracle.mode.value, distances, offset)
        offset /= 2
    raise ProbeStraddleError("Пробы попадают в разные ячейки Вороного")
