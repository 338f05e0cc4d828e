from pathlib import Path
from typing import Iterable, Optional

import pandas as pd

from config.settings import Config
from src.harness.comparator import REPORT_COLUMNS, ComparisonReport
from src.utils.logger import logger


class ComparisonReportGenerator:
    """Текстовый отчет сравнения k-NN / KDE и CSV с теми же строками"""

    @staticmethod
    def to_frame(reports: Iterable[ComparisonReport]) -> pd.DataFrame:
        frames = [r.to_frame() for r in reports]
        if not frames:
            return pd.DataFrame(columns=REPORT_COLUMNS)
        return pd.concat(frames, ignore_index=True)

    @staticmethod
    def render(reports: Iterable[ComparisonReport]) -> str:
        reports = list(reports)
        lines = ["K-NN VS KERNEL DENSITY ESTIMATION", "=" * 72, ""]
        for report in reports:
            lines.append(f"📊 {report.dataset}: train={report.n_train}, test={report.n_test}")
            lines.append(f"{'Algo':<14} {'Accuracy %':>11} {'Agreement %':>12}  {'Params'}")
            lines.append("-" * 72)
            for _, row in report.to_frame().iterrows():
                lines.append(f"{row['algo']:<14} {row['accuracy_pct']:>11.2f} {row['agreement_pct']:>12.2f}  "
                             f"{row['params']}")
            if report.protocol is not None and report.protocol.excluded:
                lines.append(f"   ⚠️ исключено почти равных запросов: {report.protocol.excluded}")
            lines.append("")
        lines.append("=" * 72)
        return "\n".join(lines) + "\n"

    @classmethod
    def write(cls, reports: Iterable[ComparisonReport], path: Optional[Path] = None) -> Path:
        """Пишет <path>.txt и <path>.csv; возвращает путь текстового отчета"""
        reports = list(reports)
        path = Path(path) if path else Config.REPORTS_DIR / "comparison_report.txt"
        if path.suffix != '.txt':
            path = path.with_suffix('.txt')
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, 'w', encoding='utf-8') as f:
            f.write(cls.render(reports))
        cls.to_frame(reports).to_csv(path.with_suffix('.csv'), index=False)
        logger.info(f"📄 Отчет сравнения: {path}")
        return path
