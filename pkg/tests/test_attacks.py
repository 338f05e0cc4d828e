import math

import numpy as np
import pytest

from config.settings import Config
from src.attacks.distance_search import (
    attack_distance_1nn, attack_plaintext_distance, attack_recover_tuple, reduce_majority_to_1nn,
)
from src.attacks.geometry import triangulate
from src.attacks.oracle import KdeOracle, KnnOracle, OracleMode, ScoreLeakingKde
from src.attacks.report import (
    AttackScenario, insert_budget, run_attack, run_attack_suite, summarize, write_attack_report,
)
from src.attacks.score_channel import attack_score_channel, distance_from_delta, recover_inserted_tuple
from src.classifier.dataset import DataTuple, Dataset
from src.classifier.kernels import gaussian_kernel
from src.utils.errors import (
    AttackError, DegenerateGeometryError, InconsistentRadiiError, NoDistanceSignal,
    OracleExhaustedError, SearchBoundError, UnsupportedReductionError,
)

EPS = 2.0 ** -20


def _hidden(point, label=1, c=2):
    return Dataset([point], [label], c)


# --- Геометрия ---

def test_triangulate_exact():
    target = np.array([0.3, 0.7])
    centers = np.array([[0.5, 0.5], [0.55, 0.5], [0.5, 0.55]])
    radii = np.linalg.norm(centers - target, axis=1)
    assert triangulate(centers, radii) == pytest.approx(target, abs=1e-9)


def test_triangulate_degenerate_and_inconsistent():
    with pytest.raises(DegenerateGeometryError):
        triangulate([[0, 0], [1, 1], [2, 2]], [1, 1, 1])
    with pytest.raises(DegenerateGeometryError):
        triangulate([[0, 0], [1, 0]], [1, 1])
    with pytest.raises(InconsistentRadiiError):
        triangulate([[0, 0], [1, 0], [0, 1]], [0.1, 0.1, 5.0])
    with pytest.raises(InconsistentRadiiError):
        triangulate([[0, 0], [1, 0], [0, 1]], [-1.0, 1.0, 1.0])


# --- Поиск расстояния ---

def test_distance_search_one_nn():
    oracle = KnnOracle(_hidden([0.3, 0.6]), k=1)
    q = np.array([0.5, 0.5])
    d = attack_distance_1nn(oracle.attacker_view(), q, epsilon=EPS, rng=np.random.default_rng(0))
    assert d == pytest.approx(np.linalg.norm(q - [0.3, 0.6]), abs=EPS)
    # запрос класса цели, догадка на границе D, 21 шаг бинарного поиска (D = sqrt(2)), проверка сигнала
    assert oracle.counters.queries == 1 + 1 + 21 + 1
    # проверка сигнала вставляет две копии
    assert oracle.counters.inserts == oracle.counters.deletes == 1 + 21 + 2


def test_distance_search_without_deletion():
    oracle = KnnOracle(_hidden([0.3, 0.6]), k=1, deletion_allowed=False)
    q = np.array([0.5, 0.5])
    d = attack_distance_1nn(oracle.attacker_view(), q, epsilon=1e-2, rng=np.random.default_rng(0))
    assert d == pytest.approx(np.linalg.norm(q - [0.3, 0.6]), abs=1e-2)
    assert oracle.counters.deletes == 0


def test_linear_descent_refuses_unaffordable_interval():
    oracle = KnnOracle(_hidden([0.3, 0.6]), k=1, deletion_allowed=False)
    with pytest.raises(OracleExhaustedError):
        attack_distance_1nn(oracle.attacker_view(), [0.5, 0.5], rng=np.random.default_rng(0))
    # отказ до первого обращения
    assert oracle.counters.total == 0


def test_linear_descent_lower_bound():
    oracle = KnnOracle(_hidden([0.3, 0.6]), k=1, deletion_allowed=False)
    with pytest.raises(SearchBoundError):
        attack_distance_1nn(oracle.attacker_view(), [0.5, 0.5], search_bound=0.5, epsilon=1e-2,
                            rng=np.random.default_rng(0), lower_bound=0.3)


@pytest.mark.parametrize("mode,k", [
    (OracleMode.RETURN_ALL_LABELS, 1),
    (OracleMode.RETURN_ALL_LABELS, 3),
    (OracleMode.MAJORITY_ONLY, 3),
])
@pytest.mark.parametrize("label", [0, 1])
def test_recover_tuple_against_knn(mode, k, label):
    target = np.array([0.35, 0.62])
    oracle = KnnOracle(_hidden(target, label), k=k, mode=mode)
    result = attack_recover_tuple(oracle.attacker_view(), [0.5, 0.5], epsilon=EPS,
                                  rng=np.random.default_rng(1)).with_truth(target)
    assert result.true_error < 1e-3
    assert result.inserts_used <= insert_budget(2, EPS, math.sqrt(2) + 0.05) * 2
    # на каждую из трех проб: запрос класса, граница D, 21 шаг поиска (D = sqrt(2) + 0.05), проверка
    assert result.queries_used == 3 * (1 + 1 + 21 + 1)
    assert result.inserts_used == 3 * ((k - 1) + 1 + 21 + 2)
    assert (result.queries_used, result.inserts_used) == (oracle.counters.queries, oracle.counters.inserts)
    # заполнители и догадки удалены
    assert oracle.counters.inserts == oracle.counters.deletes


def test_recover_tuple_three_dimensions():
    target = np.array([0.2, 0.8, 0.4])
    oracle = KnnOracle(_hidden(target, 0, c=3), k=1)
    result = attack_recover_tuple(oracle.attacker_view(), [0.5, 0.5, 0.5], epsilon=EPS,
                                  rng=np.random.default_rng(2)).with_truth(target)
    assert result.true_error < 1e-3


@pytest.mark.parametrize("mode,k", [
    (OracleMode.RETURN_ALL_LABELS, 1),
    (OracleMode.RETURN_ALL_LABELS, 3),
    (OracleMode.MAJORITY_ONLY, 3),
])
def test_recover_tuple_without_deletion(mode, k):
    target = np.array([0.35, 0.62])
    oracle = KnnOracle(_hidden(target, 1), k=k, mode=mode, deletion_allowed=False)
    result = attack_recover_tuple(oracle.attacker_view(), [0.5, 0.5],
                                  rng=np.random.default_rng(5)).with_truth(target)
    assert result.true_error <= EPS
    assert oracle.counters.deletes == 0
    assert (result.queries_used, result.inserts_used) == (oracle.counters.queries, oracle.counters.inserts)
    assert oracle.counters.total < Config.ATTACK_CONFIG['max_oracle_calls'] // 10


def test_recover_tuple_without_deletion_three_dimensions():
    target = np.array([0.2, 0.8, 0.4])
    oracle = KnnOracle(_hidden(target, 0, c=3), k=1, deletion_allowed=False)
    result = attack_recover_tuple(oracle.attacker_view(), [0.5, 0.5, 0.5],
                                  rng=np.random.default_rng(6)).with_truth(target)
    assert result.true_error <= EPS


def test_plaintext_distance_needs_no_inserts():
    target = np.array([0.7, 0.2])
    oracle = KnnOracle(_hidden(target), k=1, mode=OracleMode.WITH_PLAINTEXT_DISTANCE)
    result = attack_recover_tuple(oracle.attacker_view(), [0.5, 0.5]).with_truth(target)
    assert result.inserts_used == 0
    assert result.queries_used == 3
    assert result.true_error < 1e-9
    with pytest.raises(UnsupportedReductionError):
        attack_plaintext_distance(KnnOracle(_hidden(target), k=1).attacker_view(), [0.5, 0.5])


def test_majority_reduction_requires_divisible_k():
    oracle = KnnOracle(_hidden([0.3, 0.3]), k=2, mode=OracleMode.MAJORITY_ONLY)
    with pytest.raises(UnsupportedReductionError):
        reduce_majority_to_1nn(oracle.attacker_view(), [0.5, 0.5])


def test_kde_gives_no_distance_signal():
    oracle = KdeOracle(_hidden([0.3, 0.6]), sigma=0.25)
    with pytest.raises(NoDistanceSignal):
        attack_distance_1nn(oracle.attacker_view(), [0.5, 0.5], epsilon=EPS,
                            rng=np.random.default_rng(3))


# --- Оракулы ---

def test_attacker_view_hides_data():
    oracle = KnnOracle(_hidden([0.3, 0.6]), k=1)
    view = oracle.attacker_view()
    assert not hasattr(view, '_hidden')
    assert not hasattr(view, 'data')
    with pytest.raises(AttackError):
        view.scores([0.5, 0.5])
    with pytest.raises(AttackError):
        view.insert([0.5, 0.5], 5)


def test_oracle_call_limit():
    oracle = KnnOracle(_hidden([0.3, 0.6]), k=1, max_calls=2)
    oracle.query([0.5, 0.5])
    oracle.insert([0.1, 0.1], 0)
    with pytest.raises(OracleExhaustedError):
        oracle.query([0.5, 0.5])


# --- Утечка через оценки ---

def test_distance_from_delta_inverts_kernel():
    for d in (0.0, 0.1, 0.45):
        assert distance_from_delta(gaussian_kernel(d, 0.25), 0.25) == pytest.approx(d, abs=1e-7)
    with pytest.raises(NoDistanceSignal):
        distance_from_delta(0.0, 0.25)
    with pytest.raises(InconsistentRadiiError):
        distance_from_delta(10.0, 0.25)


def test_score_channel_reveals_inserted_tuple():
    base = Dataset([[0.1, 0.1], [0.9, 0.9]], [0, 1], 2)
    victim = DataTuple((0.55, 0.4), 1)

    system = ScoreLeakingKde(base, sigma=0.25)
    q = np.array([0.5, 0.5])
    assert attack_score_channel(system, q, victim) == pytest.approx(
        np.linalg.norm(q - victim.as_array()), abs=1e-7)

    system = ScoreLeakingKde(base, sigma=0.25)
    recovered = recover_inserted_tuple(system, None, victim, center=[0.5, 0.5])
    assert recovered == pytest.approx(victim.as_array(), abs=1e-6)


# --- Отчет ---

def test_run_attack_rows():
    ok = run_attack(AttackScenario(mode='1nn'), seed=4)
    assert ok['status'] == 'ok' and ok['error'] < 1e-3
    kde = run_attack(AttackScenario(mode='kde'), seed=4)
    assert kde['status'] == 'no signal'
    plain = run_attack(AttackScenario(mode='plaintext'), seed=4)
    assert plain['inserts'] == 0
    narrowed = run_attack(AttackScenario(mode='1nn', deletion=False), seed=4)
    assert narrowed['status'] == 'ok' and narrowed['error'] < 1e-5


def test_suite_summary_and_report(tmp_path):
    scenarios = [AttackScenario(mode='all_labels', k=3), AttackScenario(mode='kde')]
    df = run_attack_suite(scenarios, instances=2, seed=1)
    assert len(df) == 4
    summary = summarize(df)
    assert summary.set_index('mode').loc['all_labels', 'succeeded'] == 2
    assert summary.set_index('mode').loc['kde', 'no_signal'] == 2

    path = write_attack_report(df, tmp_path / "attacks.txt")
    text = path.read_text(encoding='utf-8')
    assert text.startswith("DISTANCE-LEARNING ATTACKS")
    assert (tmp_path / "attacks.csv").exists()
    # повторный прогон с тем же seed дает тот же отчет
    again = write_attack_report(run_attack_suite(scenarios, instances=2, seed=1), tmp_path / "again.txt")
    assert again.read_text(encoding='utf-8') == text
