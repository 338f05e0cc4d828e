import json

import numpy as np
import pandas as pd
import pytest

from src.classifier.dataset import Dataset
from src.harness.benchmark import BENCH_COLUMNS, format_benchmark, run_benchmark
from src.harness.comparator import (
    PROTOCOL_GAP_THRESHOLD, agreement_pct, compare, select_params,
)
from src.harness.cross_validation import cross_validate, stratified_folds
from src.harness.data_loader import (
    DatasetSchema, LoadedData, MinMaxScaler, load_csv, stratified_split, write_csv,
)
from src.harness.experiment_config import ExperimentConfig
from src.harness.report_generator import ComparisonReportGenerator
from src.harness.report_store import ReportStore
from src.harness.synthetic import make_grid_dataset, make_two_gaussians
from src.utils.errors import MalformedDataError


@pytest.fixture
def gaussians_csv(tmp_path):
    return write_csv(make_two_gaussians(n=120, seed=5), tmp_path / "two.csv")


# --- Загрузка данных ---

def test_write_and_load_csv(gaussians_csv):
    data = load_csv(gaussians_csv, DatasetSchema(label_column='label', header=True),
                    test_fraction=0.25, seed=1)
    assert len(data.train) + len(data.test) == 120
    assert len(data.test) == 30
    assert data.train.class_counts().tolist() == [45, 45]
    assert data.label_values == [0, 1]
    assert data.train.X.min() >= 0.0 and data.train.X.max() <= 1.0
    # масштаб по обучающей части: обе границы достигаются
    assert np.allclose(data.train.X.min(axis=0), 0.0)
    assert np.allclose(data.train.X.max(axis=0), 1.0)


def test_scaler_constant_feature_and_clipping():
    scaler = MinMaxScaler.fit(np.array([[1.0, 5.0], [3.0, 5.0]]))
    out = scaler.transform(np.array([[2.0, 5.0], [4.0, 7.0], [0.0, 5.0]]))
    assert out.tolist() == [[0.5, 0.0], [1.0, 0.0], [0.0, 0.0]]


def test_missing_values_dropped(tmp_path):
    rows = ["1,2,a", "3,?,b", "5,6,a", "7,8,b", "9,10,a", "11,12,b", "13,14,a", "15,16,b"]
    path = tmp_path / "missing.csv"
    path.write_text("\n".join(rows) + "\n", encoding='utf-8')
    data = load_csv(path, test_fraction=0.0, seed=0)
    assert data.dropped_rows == 1
    assert len(data.train) == 7
    assert data.label_values == ['a', 'b']


def test_too_many_missing_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,?,0\n?,2,1\n3,4,0\n", encoding='utf-8')
    with pytest.raises(MalformedDataError):
        load_csv(path, seed=0)


def test_non_numeric_feature(tmp_path):
    path = tmp_path / "text.csv"
    path.write_text("1,x,0\n2,y,1\n", encoding='utf-8')
    with pytest.raises(MalformedDataError):
        load_csv(path, seed=0)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "nope.csv")


def test_stratified_split_keeps_classes():
    y = np.array([0] * 10 + [1] * 5)
    train, test = stratified_split(y, 0.2, np.random.default_rng(0))
    assert np.bincount(y[test]).tolist() == [2, 1]
    assert len(np.intersect1d(train, test)) == 0


# --- Кросс-валидация ---

def test_folds_are_stratified():
    y = np.array([0] * 10 + [1] * 10)
    folds = stratified_folds(y, 5, np.random.default_rng(0))
    assert sorted(np.concatenate(folds).tolist()) == list(range(20))
    assert all(np.bincount(y[f], minlength=2).tolist() == [2, 2] for f in folds)


def test_cv_tie_prefers_simpler_model():
    # все значения сетки дают одинаковую точность на хорошо разделимых данных
    data = make_two_gaussians(n=60, separation=0.8, scale=0.02, seed=2)
    assert cross_validate(data, 'knn', [5, 1, 3], folds=3, seed=0).best == 1
    assert cross_validate(data, 'kde', [0.1, 0.3, 0.2], folds=3, seed=0).best == pytest.approx(0.3)


def test_cv_errors():
    data = make_two_gaussians(n=10, seed=1)
    with pytest.raises(ValueError):
        cross_validate(data, 'knn', [], folds=2)
    with pytest.raises(ValueError):
        cross_validate(data, 'svm', [1], folds=2)
    with pytest.raises(ValueError):
        cross_validate(data, 'knn', [20], folds=2)


# --- Конфигурация ---

def test_experiment_config_load_and_override(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({'dataset': 'cancer1', 'k': 3, 'seed': 7}), encoding='utf-8')
    config = ExperimentConfig.load(path)
    assert config.k == 3
    assert config.with_overrides(k=None, sigma=0.5).sigma == 0.5
    assert config.with_overrides(k=None).k == 3


def test_experiment_config_yaml(tmp_path):
    pytest.importorskip("yaml")
    path = tmp_path / "exp.yaml"
    path.write_text("dataset: diabetes\nalgorithms: [knn, kde, uniform]\n", encoding='utf-8')
    assert ExperimentConfig.load(path).algorithms == ['knn', 'kde', 'uniform']


def test_experiment_config_rejects_unknown(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({'datset': 'cancer1'}), encoding='utf-8')
    with pytest.raises(ValueError):
        ExperimentConfig.load(path)
    with pytest.raises(ValueError):
        ExperimentConfig(algorithms=['svm'])
    with pytest.raises(ValueError):
        ExperimentConfig(algorithms=[])


# --- Сравнение ---

def _loaded(seed=3):
    full = make_two_gaussians(n=100, seed=seed)
    idx = np.arange(100)
    return LoadedData(full.subset(idx[:80]), full.subset(idx[80:]), 0, None, [0, 1])


def test_compare_self_agreement():
    config = ExperimentConfig(algorithms=['kde', 'kde'], sigma=0.2, seed=0)
    report = compare(_loaded(), config, name='two')
    assert [r.agreement_pct for r in report.results] == [100.0, 100.0]


def test_compare_uniform_kernel_equals_knn():
    config = ExperimentConfig(algorithms=['knn', 'uniform'], k=5, seed=0)
    report = compare(_loaded(), config)
    assert report.result('uniform').agreement_pct == pytest.approx(100.0)


def test_compare_selects_params_by_cv():
    config = ExperimentConfig(algorithms=['knn', 'kde'], k_grid=[1, 3], sigma_grid=[0.1, 0.2], folds=3, seed=0)
    report = compare(_loaded(), config)
    assert report.result('knn').params['k'] in (1, 3)
    assert report.result('kde').params['sigma'] in (0.1, 0.2)
    frame = report.to_frame()
    assert frame['algo'].tolist() == ['knn', 'kde']
    assert (frame['accuracy_pct'] > 80).all()


def test_select_params_filters_large_k():
    train = make_two_gaussians(n=10, seed=0)
    config = ExperimentConfig(k_grid=[1, 3, 50], folds=2, seed=0)
    assert select_params(train, 'knn', config)['k'] in (1, 3)


def test_agreement_pct():
    assert agreement_pct(np.array([0, 1, 1, 0]), np.array([0, 1, 0, 0])) == 75.0
    assert agreement_pct(np.array([]), np.array([])) == 100.0


def test_compare_with_protocol(toy_dataset):
    test = Dataset([[0.25, 0.25], [0.75, 0.875], [0.125, 0.875]], [0, 1, 0], 2)
    data = LoadedData(toy_dataset, test, 0, None, [0, 1])
    config = ExperimentConfig(algorithms=['kde'], sigma=0.25, seed=3, protocol=True,
                              protocol_queries=2, key_bits=1024)
    report = compare(data, config, name='toy')
    assert report.protocol.queries == 2
    assert report.protocol.excluded == 0
    assert report.protocol.agreement_pct == 100.0
    assert report.to_frame()['algo'].tolist() == ['kde', 'kde-protocol']
    assert PROTOCOL_GAP_THRESHOLD < 1e-10


def test_protocol_requires_kde():
    config = ExperimentConfig(algorithms=['knn'], k=1, protocol=True, key_bits=1024)
    with pytest.raises(ValueError):
        compare(_loaded(), config)


# --- Отчеты и хранилище ---

def test_report_generator(tmp_path):
    config = ExperimentConfig(algorithms=['knn', 'kde'], k=3, sigma=0.2, seed=0)
    reports = [compare(_loaded(1), config, name='a'), compare(_loaded(2), config, name='b')]
    text = ComparisonReportGenerator.render(reports)
    assert text.startswith("K-NN VS KERNEL DENSITY ESTIMATION")
    assert "📊 a:" in text and "📊 b:" in text
    path = ComparisonReportGenerator.write(reports, tmp_path / "cmp")
    assert path.suffix == '.txt'
    csv = pd.read_csv(path.with_suffix('.csv'))
    assert len(csv) == 4
    assert path.read_text(encoding='utf-8') == text


def test_report_store_upsert(tmp_path):
    config = ExperimentConfig(algorithms=['knn', 'kde'], k=3, sigma=0.2, seed=0)
    frame = compare(_loaded(), config, name='two').to_frame()
    with ReportStore(tmp_path / "results.db") as store:
        store.save_comparison(frame, 'run-1')
        store.save_comparison(frame, 'run-1')
        store.save_comparison(frame, 'run-2')
        assert len(store.load_comparisons()) == 4
        loaded = store.load_comparisons('run-1')
        assert loaded['algo'].tolist() == ['kde', 'knn']

        attacks = pd.DataFrame([{'mode': '1nn', 'k': 1, 'm': 2, 'instance': 0, 'status': 'ok',
                                 'error': 1e-6, 'queries': 60, 'inserts': 70, 'insert_budget': 134}])
        store.save_attacks(attacks, 'run-1')
        assert store.load_attacks('run-1')['status'].tolist() == ['ok']
        assert store.load_attacks('missing').empty


def test_grid_dataset_labels():
    data = make_grid_dataset(points_per_axis=3, m=2, n_classes=2)
    assert len(data) == 9
    assert data.class_counts().tolist() == [5, 4]


def test_benchmark_phases():
    df = run_benchmark(key_bits=1024, seed=2, n=4, repeats=1)
    assert list(df.columns) == BENCH_COLUMNS
    assert df['phase'].tolist() == ['keygen', 'encrypt', 'decrypt', 'hom_add', 'hom_scale',
                                    'squared_dist', 'kernel_values', 'classify']
    assert (df['mean_ms'] >= 0).all()
    assert format_benchmark(df).startswith("PAILLIER / PROTOCOL BENCHMARK")
    with pytest.raises(ValueError):
        run_benchmark(key_bits=1024, repeats=0)
