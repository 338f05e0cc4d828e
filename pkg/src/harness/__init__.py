"""
Стенд экспериментов: загрузка данных, подбор параметров, сравнение k-NN и KDE,
отчеты, хранилище результатов, бенчмарк.
"""

from .data_loader import DatasetSchema, LoadedData, MinMaxScaler, load_csv, load_preset, write_csv
from .cross_validation import CvResult, cross_validate
from .experiment_config import ExperimentConfig
from .comparator import ComparisonReport, compare
from .report_generator import ComparisonReportGenerator
from .report_store import ReportStore
from .benchmark import run_benchmark
from .synthetic import make_grid_dataset, make_two_gaussians, make_unbalanced_scenario

__all__ = [
    'DatasetSchema', 'LoadedData', 'MinMaxScaler', 'load_csv', 'load_preset', 'write_csv',
    'CvResult', 'cross_validate', 'ExperimentConfig',
    'ComparisonReport', 'compare', 'ComparisonReportGenerator', 'ReportStore',
    'run_benchmark', 'make_grid_dataset', 'make_two_gaussians', 'make_unbalanced_scenario',
]
