"""
Result persistence: the SQL trial store used for crash-resume, and the
series CSV / JSON archive artifacts of a finished experiment.
"""

from pathlib import Path
from typing import List, Optional, Set, Tuple, Union
import pandas as pd
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session, sessionmaker

from src.core.exceptions import StorageError
from src.core.logging_config import get_logger
from src.database.connection import SessionLocal, init_db
from src.harness.models import TrialRecord
from src.harness.schemas import ExperimentResult, TAggregate, TrialRow

logger = get_logger("harness")

PathLike = Union[str, Path]
SERIES_FILE = "series.csv"
ARCHIVE_FILE = "archive.json"
SERIES_COLUMNS = ["T", "mean_mse", "median_mse", "std_mse", "trials"]


def query_rows(db: Session, key: str) -> List[TrialRow]:
    """Trial rows of an experiment, ordered by (T, trial)."""
    records = (
        db.query(TrialRecord)
        .filter(TrialRecord.experiment_key == key)
        .order_by(TrialRecord.T, TrialRecord.trial)
        .all()
    )
    return [
        TrialRow(
            T=r.T,
            trial=r.trial,
            seed=int(r.seed),
            mse=r.mse,
            realized_S_T=r.realized_S_T,
            mu_used=r.mu_used,
            solver_iterations=r.solver_iterations,
            converged=r.converged,
            rank_deficient=r.rank_deficient,
            error=r.error,
        )
        for r in records
    ]


class ResultStore:
    """Append-only store of trial rows keyed by experiment."""

    def __init__(self, session_factory: sessionmaker = SessionLocal):
        self._session_factory = session_factory

    def _session(self) -> Session:
        return self._session_factory()

    def completed_cells(self, key: str) -> Set[Tuple[int, int]]:
        with self._session() as db:
            rows = db.query(TrialRecord.T, TrialRecord.trial).filter(TrialRecord.experiment_key == key).all()
        return {(int(T), int(trial)) for T, trial in rows}

    def save(self, key: str, row: TrialRow):
        """Persist one cell; committed immediately."""
        record = TrialRecord(
            experiment_key=key,
            T=row.T,
            trial=row.trial,
            seed=str(row.seed),
            mse=row.mse,
            realized_S_T=row.realized_S_T,
            mu_used=row.mu_used,
            solver_iterations=row.solver_iterations,
            converged=row.converged,
            rank_deficient=row.rank_deficient,
            error=row.error[:500] if row.error else None,
        )
        with self._session() as db:
            try:
                db.add(record)
                db.commit()
            except SQLAlchemyError as e:
                db.rollback()
                logger.error(f"Failed to store cell T={row.T} trial={row.trial}: {str(e)}")
                raise StorageError(f"Failed to store trial T={row.T}, trial={row.trial}: {e}")

    def load_rows(self, key: str) -> List[TrialRow]:
        with self._session() as db:
            return query_rows(db, key)

    def clear(self, key: str) -> int:
        with self._session() as db:
            deleted = db.query(TrialRecord).filter(TrialRecord.experiment_key == key).delete()
            db.commit()
        logger.info(f"Cleared {deleted} stored cells for experiment {key}")
        return int(deleted)


_result_store: Optional[ResultStore] = None


def get_result_store() -> ResultStore:
    """Get or create the global result store (tables created on first use)."""
    global _result_store
    if _result_store is None:
        init_db()
        _result_store = ResultStore()
    return _result_store


def series_frame(aggregates: List[TAggregate]) -> pd.DataFrame:
    return pd.DataFrame([a.model_dump(include=set(SERIES_COLUMNS)) for a in aggregates], columns=SERIES_COLUMNS)


def emit_series(result: ExperimentResult, directory: PathLike) -> Tuple[Path, Path]:
    """
    Write series.csv (T,mean_mse,median_mse,std_mse,trials) and archive.json.

    Returns:
        (csv path, archive path)
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / SERIES_FILE
        archive_path = directory / ARCHIVE_FILE
        series_frame(result.aggregates).to_csv(csv_path, index=False, float_format="%.17g")
        archive_path.write_text(result.model_dump_json(indent=2), encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Cannot write results to {directory}: {e}")
    logger.info(f"Wrote {csv_path} and {archive_path}")
    return csv_path, archive_path


def load_archive(path: PathLike) -> ExperimentResult:
    path = Path(path)
    if path.is_dir():
        path = path / ARCHIVE_FILE
    try:
        return ExperimentResult.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise StorageError(f"Cannot read archive {path}: {e}")


def load_series(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if path.is_dir():
        path = path / SERIES_FILE
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except OSError as e:
        raise StorageError(f"Cannot read series {path}: {e}")
