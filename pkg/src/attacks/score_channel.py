"""
Утечка через сырые суммы ядер: если система раскрывает вектор оценок классов,
прирост после вставки кортежа t равен K(||t - q||), и расстояние обращается явно.
"""
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from config.settings import Config
from src.attacks.geometry import triangulate
from src.attacks.oracle import ScoreLeakingKde
from src.classifier.dataset import DataTuple
from src.classifier.kernels import gaussian_peak
from src.utils.errors import InconsistentRadiiError, NoDistanceSignal

# Допуск на округление, когда прирост чуть выше пика ядра
PEAK_TOLERANCE = 1e-12


def distance_from_delta(delta: float, sigma: float) -> float:
    """d = sigma * sqrt(-2 ln(sigma * sqrt(2 pi) * delta))"""
    if delta <= 0:
        raise NoDistanceSignal(f"Прирост оценки {delta} <= 0")
    ratio = delta / gaussian_peak(sigma)
    if ratio > 1.0 + PEAK_TOLERANCE:
        raise InconsistentRadiiError(f"Прирост оценки выше пика ядра (в {ratio:.6f} раз)")
    return sigma * math.sqrt(max(0.0, -2.0 * math.log(min(ratio, 1.0))))


def _total(scores) -> float:
    return float(np.sum(scores.as_array()))


def attack_score_channel(system: ScoreLeakingKde, q: Sequence[float], t: DataTuple) -> float:
    """||t - q|| по оценкам до и после вставки t"""
    before = _total(system.scores(q))
    system.victim_insert(t)
    after = _total(system.scores(q))
    return distance_from_delta(after - before, system.sigma)


def recover_inserted_tuple(system: ScoreLeakingKde, probes: Optional[Sequence[Sequence[float]]],
                           insert: Union[DataTuple, Callable[[], None]],
                           center: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    m+1 проб до и после вставки жертвы, затем триангуляция.
    insert - кортеж жертвы либо функция, выполняющая вставку.
    """
    if probes is None:
        c = np.full(system.m, 0.5) if center is None else np.asarray(center, dtype=float)
        probes = np.vstack([c, c + Config.ATTACK_CONFIG['probe_offset'] * np.eye(system.m)])
    probes = np.asarray(probes, dtype=float)

    before = [_total(system.scores(p)) for p in probes]
    if callable(insert):
        insert()
    else:
        system.victim_insert(insert)
    after = [_total(system.scores(p)) for p in probes]

    distances = [distance_from_delta(a - b, system.sigma) for a, b in zip(after, before)]
    return triangulate(probes, distances, tolerance=1e-6)
