"""
Прогон набора атак и отчет: ошибка восстановления, число запросов и вставок по режимам оракула.
"""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

from config.settings import Config
from src.attacks.distance_search import attack_recover_tuple
from src.attacks.oracle import KdeOracle, KnnOracle, OracleMode
from src.classifier.dataset import Dataset
from src.utils.errors import AttackError, NoDistanceSignal
from src.utils.logger import logger

REPORT_COLUMNS = ['mode', 'k', 'm', 'instance', 'status', 'error', 'queries', 'inserts', 'insert_budget']

ATTACK_MODES = {
    '1nn': OracleMode.RETURN_ALL_LABELS,
    'all_labels': OracleMode.RETURN_ALL_LABELS,
    'majority': OracleMode.MAJORITY_ONLY,
    'plaintext': OracleMode.WITH_PLAINTEXT_DISTANCE,
}


@dataclass
class AttackScenario:
    mode: str = '1nn'       # 1nn | all_labels | majority | plaintext | kde
    k: int = 1
    m: int = 2
    n_classes: int = 2
    sigma: float = 0.25     # только для kde
    deletion: bool = True   # без удаления - восстановление сужением


def make_hidden_dataset(m: int, n_classes: int, rng: np.random.Generator) -> Dataset:
    """Один скрытый кортеж внутри [0.1, 0.9]^m со случайным классом"""
    x = rng.uniform(0.1, 0.9, size=(1, m))
    return Dataset(x, [int(rng.integers(n_classes))], n_classes)


def insert_budget(m: int, epsilon: float, search_bound: float) -> int:
    """2 (d+1) (log2(D / eps) + 2)"""
    return int(2 * (m + 1) * (math.log2(search_bound / epsilon) + 2))


def _oracle_for(scenario: AttackScenario, data: Dataset):
    if scenario.mode == 'kde':
        return KdeOracle(data, scenario.sigma, deletion_allowed=scenario.deletion)
    if scenario.mode not in ATTACK_MODES:
        raise AttackError(f"Неизвестный режим атаки: {scenario.mode}")
    return KnnOracle(data, k=scenario.k, mode=ATTACK_MODES[scenario.mode], deletion_allowed=scenario.deletion)


def run_attack(scenario: AttackScenario, instance: int = 0, epsilon: Optional[float] = None,
               seed: Optional[int] = None) -> dict:
    """Одна атака на случайный скрытый кортеж; ошибку считает стенд, не атакующий"""
    epsilon = epsilon or Config.ATTACK_CONFIG['epsilon']
    rng = np.random.default_rng(seed)
    data = make_hidden_dataset(scenario.m, scenario.n_classes, rng)
    oracle = _oracle_for(scenario, data)
    center = np.full(scenario.m, 0.5)
    bound = math.sqrt(scenario.m) + Config.ATTACK_CONFIG['probe_offset']

    row = {'mode': scenario.mode, 'k': scenario.k, 'm': scenario.m, 'instance': instance,
           'status': 'ok', 'error': np.nan, 'queries': 0, 'inserts': 0,
           'insert_budget': insert_budget(scenario.m, epsilon, bound)}
    view = oracle.attacker_view()
    try:
        result = attack_recover_tuple(view, center, epsilon=epsilon, rng=rng).with_truth(data.X[0])
        row.update(error=result.true_error, queries=result.queries_used, inserts=result.inserts_used)
    except NoDistanceSignal:
        row['status'] = 'no signal'
    except AttackError as e:
        row['status'] = type(e).__name__
        logger.warning(f"⚠️ Атака {scenario.mode} (k={scenario.k}, m={scenario.m}): {e}")
    finally:
        counters = view.counters
        if row['status'] != 'ok':
            row.update(queries=counters.queries, inserts=counters.inserts)
    return row


def run_attack_suite(scenarios: Iterable[AttackScenario], instances: int = 20,
                     epsilon: Optional[float] = None, seed: int = 0) -> pd.DataFrame:
    rows: List[dict] = []
    for s_idx, scenario in enumerate(scenarios):
        logger.info(f"🗡️ Атака {scenario.mode}: k={scenario.k}, m={scenario.m}, {instances} экземпляров")
        for i in range(instances):
            rows.append(run_attack(scenario, i, epsilon, seed=seed * 1_000_003 + s_idx * 1009 + i))
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def summarize(df: pd.DataFrame) -> pd.DataFrame:
    """Сводка по режимам: доля успехов, максимальная ошибка, средние запросы и вставки"""
    if df.empty:
        return pd.DataFrame()
    return (df.groupby(['mode', 'k', 'm'], sort=False)
              .agg(instances=('status', 'size'),
                   succeeded=('status', lambda s: int((s == 'ok').sum())),
                   no_signal=('status', lambda s: int((s == 'no signal').sum())),
                   max_error=('error', 'max'),
                   mean_queries=('queries', 'mean'),
                   mean_inserts=('inserts', 'mean'),
                   insert_budget=('insert_budget', 'max'))
              .reset_index())


def write_attack_report(df: pd.DataFrame, path: Optional[Path] = None) -> Path:
    """Текстовый отчет и CSV рядом"""
    path = Path(path) if path else Config.REPORTS_DIR / "attack_report.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    summary = summarize(df)

    with open(path, 'w', encoding='utf-8') as f:
        f.write("DISTANCE-LEARNING ATTACKS\n")
        f.write("=" * 72 + "\n\n")
        f.write(f"{'Mode':<12} {'k':>3} {'m':>3} {'OK':>6} {'NoSig':>6} {'MaxErr':>10} "
                f"{'Queries':>9} {'Inserts':>9} {'Budget':>7}\n")
        f.write("-" * 72 + "\n")
        for _, row in summary.iterrows():
            max_err = "-" if pd.isna(row['max_error']) else f"{row['max_error']:.2e}"
            f.write(f"{row['mode']:<12} {row['k']:>3} {row['m']:>3} "
                    f"{row['succeeded']:>3}/{row['instances']:<2} {row['no_signal']:>6} {max_err:>10} "
                    f"{row['mean_queries']:>9.1f} {row['mean_inserts']:>9.1f} {row['insert_budget']:>7}\n")
        f.write("\n" + "=" * 72 + "\n")

    df.to_csv(path.with_suffix('.csv'), index=False)
    logger.info(f"📄 Отчет по атакам: {path}")
    return path
