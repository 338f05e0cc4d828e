"""
Замеры времени по фазам: операции Paillier и шаги протокола на синтетических данных.
"""
import time
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from config.settings import Config
from src.crypto.fixedpoint import FixedPointParams
from src.crypto.paillier import decrypt, encrypt, hom_add, hom_scale, keygen
from src.harness.synthetic import make_two_gaussians
from src.protocol.algorithms import kernel_values, squared_dist
from src.protocol.session import ProtocolSession, SessionConfig
from src.utils.logger import logger
from src.utils.rng import RandomSource

BENCH_COLUMNS = ['phase', 'repeats', 'mean_ms', 'min_ms', 'max_ms']

# Шифрование 32-битного числа: порядка 9.7 мс на эталонной машине, допускаем 100x
ENCRYPT_REFERENCE_MS = 9.7
ENCRYPT_SANITY_FACTOR = 100


def _time_ms(fn: Callable, repeats: int) -> List[float]:
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - started) * 1000.0)
    return samples


def _row(phase: str, samples: List[float]) -> Dict:
    return {'phase': phase, 'repeats': len(samples), 'mean_ms': float(np.mean(samples)),
            'min_ms': float(np.min(samples)), 'max_ms': float(np.max(samples))}


def run_benchmark(key_bits: Optional[int] = None, seed=None, n: int = 20, m: int = 2,
                  repeats: int = 5, transport: Optional[str] = None,
                  fixed_point: Optional[Dict] = None) -> pd.DataFrame:
    """
    Фазы: keygen, encrypt, decrypt, hom_add, hom_scale, squared_dist,
    kernel_values, classify. Возвращает таблицу BENCH_COLUMNS.
    Ключам короче KEY_BITS по умолчанию достаются урезанные параметры квантования.
    """
    key_bits = key_bits or Config.KEY_BITS
    if repeats < 1:
        raise ValueError("repeats должно быть >= 1")
    if fixed_point is None:
        fixed_point = {} if key_bits >= Config.KEY_BITS else dict(Config.FIXED_POINT_REDUCED)
    logger.info(f"⏱️ Бенчмарк: ключ {key_bits} бит, n={n}, m={m}, повторов {repeats}")
    rng = RandomSource(seed)
    data = make_two_gaussians(n=n, m=m, seed=rng.randbits(32))
    rows = []

    started = time.perf_counter()
    pk, sk = keygen(key_bits, rng=rng.spawn('keygen'))
    rows.append(_row('keygen', [(time.perf_counter() - started) * 1000.0]))

    params = FixedPointParams.for_key(key_bits, m, 2, **fixed_point)
    config = SessionConfig(params=params, keys=(pk, sk), seed=seed, transport=transport)
    with ProtocolSession(config) as session:
        enc_rng = rng.spawn('bench-encrypt')
        x = rng.randbits(32)

        encrypt_ms = _time_ms(lambda: encrypt(pk, x, enc_rng), repeats)
        rows.append(_row('encrypt', encrypt_ms))
        a, b = encrypt(pk, x, enc_rng), encrypt(pk, x + 1, enc_rng)
        rows.append(_row('decrypt', _time_ms(lambda: decrypt(sk, a), repeats)))
        rows.append(_row('hom_add', _time_ms(lambda: hom_add(a, b), repeats)))
        rows.append(_row('hom_scale', _time_ms(lambda: hom_scale(a, x), repeats)))

        session.outsource(data)
        dh, store = session.data_host, session.data_host.store
        query = session.querier.encrypt_query(data.X[0])
        rows.append(_row('squared_dist', _time_ms(
            lambda: squared_dist(dh, session.channel, query, store[0].enc_features), repeats)))
        rows.append(_row('kernel_values', _time_ms(
            lambda: kernel_values(dh, session.channel, query, store, session.params), repeats)))
        rows.append(_row('classify', _time_ms(lambda: session.query(data.X[0]), repeats)))

    df = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    limit = ENCRYPT_REFERENCE_MS * ENCRYPT_SANITY_FACTOR
    mean_encrypt = float(np.mean(encrypt_ms))
    if mean_encrypt > limit:
        logger.warning(f"⚠️ Шифрование {mean_encrypt:.1f} мс, больше допустимых {limit:.0f} мс")
    return df


def format_benchmark(df: pd.DataFrame) -> str:
    lines = ["PAILLIER / PROTOCOL BENCHMARK", "=" * 60,
             f"{'Phase':<16} {'Repeats':>8} {'Mean ms':>10} {'Min ms':>10} {'Max ms':>10}", "-" * 60]
    for _, row in df.iterrows():
        lines.append(f"{row['phase']:<16} {row['repeats']:>8} {row['mean_ms']:>10.2f} "
                     f"{row['min_ms']:>10.2f} {row['max_ms']:>10.2f}")
    lines.append("=" * 60)
    return "\n".join(lines) + "\n"
