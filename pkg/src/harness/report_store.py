import uuid
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from sqlalchemy import create_engine, text
from sqlalchemy.pool import NullPool

from config.settings import Config
from src.harness.comparator import REPORT_COLUMNS
from src.utils.logger import logger


class ReportStore:
    """
    SQLite-хранилище результатов: сравнения k-NN / KDE и прогоны атак.
    Повторное сохранение того же run_id перезаписывает строки (upsert).
    """

    def __init__(self, db_path: Optional[Union[str, Path]] = None):
        self.db_path = Path(db_path or Config.DB_PATH)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        # NullPool: каждое соединение создается заново, файл не остается заблокированным
        self.engine = create_engine(
            f'sqlite:///{self.db_path}',
            poolclass=NullPool,
            connect_args={'check_same_thread': False}
        )
        self._init_db()

    def close(self):
        if self.engine:
            self.engine.dispose(close=True)
            logger.debug(f"Database {self.db_path} closed")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def _init_db(self):
        try:
            with self.engine.connect() as conn:
                conn.execute(text("PRAGMA journal_mode=WAL;"))
                conn.execute(text("""
                    CREATE TABLE IF NOT EXISTS comparisons (
                        run_id TEXT NOT NULL, dataset TEXT NOT NULL, algo TEXT NOT NULL,
                        accuracy_pct REAL, agreement_pct REAL,
                        n_train INTEGER, n_test INTEGER, params TEXT,
                        PRIMARY KEY (run_id, dataset, algo)
                    )
                """))
                conn.execute(text("""
                    CREATE TABLE IF NOT EXISTS attacks (
                        run_id TEXT NOT NULL, mode TEXT NOT NULL, k INTEGER NOT NULL,
                        m INTEGER NOT NULL, instance INTEGER NOT NULL,
                        status TEXT, error REAL, queries INTEGER, inserts INTEGER, insert_budget INTEGER,
                        PRIMARY KEY (run_id, mode, k, m, instance)
                    )
                """))
                conn.commit()
        except Exception as e:
            logger.error(f"Critical DB Init Error: {e}")
            raise

    def _upsert_data(self, df: pd.DataFrame, table_name: str):
        if df.empty:
            return
        temp_table = f"temp_{table_name}_{uuid.uuid4().hex[:12]}"
        with self.engine.begin() as conn:
            try:
                df.to_sql(temp_table, conn, if_exists='replace', index=False)
                cols_str = ", ".join(df.columns)
                conn.execute(text(f"INSERT OR REPLACE INTO {table_name} ({cols_str}) "
                                  f"SELECT {cols_str} FROM {temp_table}"))
                conn.execute(text(f"DROP TABLE IF EXISTS {temp_table}"))
                logger.info(f"💾 Upsert в {table_name}: {len(df)} строк")
            except Exception as e:
                logger.error(f"Ошибка Upsert в {table_name}: {e}")
                raise

    # --- Сохранение ---

    def save_comparison(self, df: pd.DataFrame, run_id: str):
        """df в формате ComparisonReport.to_frame()"""
        rows = df[REPORT_COLUMNS].copy()
        rows.insert(0, 'run_id', run_id)
        self._upsert_data(rows, 'comparisons')

    def save_attacks(self, df: pd.DataFrame, run_id: str):
        """df в формате run_attack_suite()"""
        rows = df.copy()
        rows.insert(0, 'run_id', run_id)
        self._upsert_data(rows, 'attacks')

    # --- Чтение ---

    def load_comparisons(self, run_id: Optional[str] = None) -> pd.DataFrame:
        query = "SELECT * FROM comparisons"
        params = {}
        if run_id is not None:
            query += " WHERE run_id = :run_id"
            params['run_id'] = run_id
        return pd.read_sql_query(text(query + " ORDER BY run_id, dataset, algo"), self.engine, params=params)

    def load_attacks(self, run_id: Optional[str] = None) -> pd.DataFrame:
        query = "SELECT * FROM attacks"
        params = {}
        if run_id is not None:
            query += " WHERE run_id = :run_id"
            params['run_id'] = run_id
        return pd.read_sql_query(text(query + " ORDER BY run_id, mode, k, m, instance"), self.engine,
                                 params=params)
