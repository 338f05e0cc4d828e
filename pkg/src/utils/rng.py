"""
Источники случайности.

RandomSource оборачивает либо криптостойкий secrets.SystemRandom,
либо детерминированный random.Random (тестовый режим с seed).
Все стороны протокола получают свой собственный экземпляр через spawn().
"""
import hashlib
import random
import secrets
import threading
from typing import Dict, Optional, Union

import numpy as np

SeedLike = Optional[Union[int, str, bytes]]


def _seed_to_int(seed: SeedLike) -> int:
    if isinstance(seed, int):
        return seed
    if isinstance(seed, str):
        seed = seed.encode('utf-8')
    return int.from_bytes(hashlib.sha256(seed).digest(), 'big')


class RandomSource:
    """
    Handle над генератором случайных чисел.
    seed=None -> SystemRandom (боевой режим), иначе воспроизводимый поток.
    """

    def __init__(self, seed: SeedLike = None):
        self.seed = seed
        self.deterministic = seed is not None
        self._spawned: Dict[str, int] = {}
        self._spawn_lock = threading.Lock()
        if self.deterministic:
            self._rng = random.Random(_seed_to_int(seed))
        else:
            self._rng = secrets.SystemRandom()

    def __repr__(self):
        mode = "seeded" if self.deterministic else "secure"
        return f"RandomSource({mode})"

    # --- Целые числа ---

    def randbits(self, k: int) -> int:
        if k <= 0:
            return 0
        return self._rng.getrandbits(k)

    def randbelow(self, upper: int) -> int:
        """Равномерно из [0, upper) для сколь угодно больших upper"""
        if upper <= 0:
            raise ValueError(f"upper должен быть > 0, получено {upper}")
        return self._rng.randrange(upper)

    def randrange(self, lower: int, upper: int) -> int:
        return lower + self.randbelow(upper - lower)

    def randbit(self) -> int:
        return self._rng.getrandbits(1)

    def token_bytes(self, n: int) -> bytes:
        return self.randbits(8 * n).to_bytes(n, 'big') if n > 0 else b''

    def shuffle(self, items: list):
        self._rng.shuffle(items)

    # --- Производные потоки ---

    def spawn(self, label: str) -> "RandomSource":
        """
        Дочерний поток. В тестовом режиме он зависит от seed, метки и номера
        вызова с этой меткой: порядок вызовов с разными метками на потоки
        не влияет, а повторный spawn с той же меткой (новый запрос) дает
        новый поток.
        """
        if not self.deterministic:
            return RandomSource()
        with self._spawn_lock:
            count = self._spawned.get(label, 0)
            self._spawned[label] = count + 1
        material = f"{_seed_to_int(self.seed)}/{label}"
        if count:
            material += f"#{count}"
        material = material.encode('utf-8')
        return RandomSource(material)

    def numpy_generator(self) -> np.random.Generator:
        """numpy Generator для вещественных вычислений; каждый вызов продвигает поток"""
        return np.random.default_rng(self.randbits(128))
