"""
Database model for Monte-Carlo trial results.
One row per (experiment, T, trial) cell; the unique constraint makes re-runs resumable.
"""

from sqlalchemy import Boolean, Column, DateTime, Float, Integer, String, UniqueConstraint
from sqlalchemy.sql import func
from src.database.connection import Base


class TrialRecord(Base):
    """Outcome of a single trial of an experiment."""
    __tablename__ = "trial_results"
    __table_args__ = (
        UniqueConstraint("experiment_key", "T", "trial", name="uq_trial_cell"),
    )

    id = Column(Integer, primary_key=True, index=True)

    # Cell identity
    experiment_key = Column(String(32), nullable=False, index=True)
    T = Column(Integer, nullable=False)
    trial = Column(Integer, nullable=False)
    seed = Column(String(20), nullable=False)  # 64-bit unsigned, kept as text

    # Outcome
    mse = Column(Float, nullable=True)  # NULL for a trial that raised
    realized_S_T = Column(Float, nullable=True)
    mu_used = Column(Float, nullable=True)
    solver_iterations = Column(Integer, nullable=False)
    converged = Column(Boolean, nullable=False, default=True)
    rank_deficient = Column(Boolean, nullable=False, default=False)
    error = Column(String(500), nullable=True)

    created_at = Column(DateTime(timezone=True), server_default=func.now())

    def __repr__(self):
        return f"<TrialRecord(key={self.experiment_key}, T={self.T}, trial={self.trial}, mse={self.mse}, error={self.error is not None})>"
