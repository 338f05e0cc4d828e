"""
Конфигурация эксперимента: файл JSON или YAML плюс переопределения флагами CLI.
"""
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from config.settings import Config
from src.utils.logger import logger

# Безопасный импорт PyYAML
try:
    import yaml
except ImportError:
    yaml = None


@dataclass
class ExperimentConfig:
    dataset: Optional[str] = None           # имя пресета или путь к CSV
    data_dir: Optional[str] = None
    label_column: Union[int, str] = -1      # для произвольного CSV
    header: bool = False
    test_fraction: float = Config.EXPERIMENT_DEFAULTS['test_fraction']
    algorithms: List[str] = field(default_factory=lambda: ['knn', 'kde'])
    kernel: str = 'gaussian'
    k: Optional[int] = None
    sigma: Optional[float] = None
    k_grid: List[int] = field(default_factory=lambda: list(Config.EXPERIMENT_DEFAULTS['k_grid']))
    sigma_grid: List[float] = field(default_factory=lambda: list(Config.EXPERIMENT_DEFAULTS['sigma_grid']))
    folds: int = Config.EXPERIMENT_DEFAULTS['folds']
    seed: Optional[int] = None
    protocol: bool = False
    protocol_queries: int = Config.EXPERIMENT_DEFAULTS['protocol_queries']
    key_bits: Optional[int] = None
    fixed_point: Dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None

    def __post_init__(self):
        unknown = set(self.algorithms) - {'knn', 'kde', 'uniform'}
        if unknown:
            raise ValueError(f"Неизвестные алгоритмы: {sorted(unknown)}")
        if not self.algorithms:
            raise ValueError("Список алгоритмов пуст")
        if self.k is None and not self.k_grid and ({'knn', 'uniform'} & set(self.algorithms)):
            raise ValueError("Нужно k или непустая сетка k_grid")
        if self.sigma is None and not self.sigma_grid and 'kde' in self.algorithms:
            raise ValueError("Нужна sigma или непустая сетка sigma_grid")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """Загрузка из .json / .yaml / .yml; неизвестные ключи - ошибка"""
        path = Path(path)
        with open(path, 'r', encoding='utf-8') as f:
            if path.suffix == '.json':
                data = json.load(f)
            elif path.suffix in ('.yaml', '.yml'):
                if yaml is None:
                    raise ImportError("PyYAML не установлен. Загрузка .yaml файлов невозможна. (pip install PyYAML)")
                data = yaml.safe_load(f) or {}
            else:
                raise ValueError(f"Неподдерживаемый формат файла: {path.suffix}")

        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            logger.error(f"Неизвестные ключи в {path.name}: {sorted(unknown)}")
            raise ValueError(f"Неизвестные ключи конфигурации: {sorted(unknown)}")
        logger.info(f"⚙️ Конфигурация эксперимента загружена из {path.name}")
        return cls(**data)

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Флаги CLI поверх файла; None означает 'не задано'"""
        values = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
