"""SQLAlchemy models for the run archive"""

from sqlalchemy import JSON, BigInteger, Column, DateTime, Integer, String, Text, UniqueConstraint, Uuid
from sqlalchemy.orm import declarative_base
from datetime import datetime, timezone
import uuid

Base = declarative_base()


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class RunRow(Base):
    """One archived run, tagged with the experiment it belongs to"""

    __tablename__ = "run_records"
    __table_args__ = (
        UniqueConstraint("experiment", "heuristic", "instance_name", "iterations", "run_index", name="uq_run_cell"),
    )

    id = Column(Uuid, primary_key=True, default=uuid.uuid4)
    experiment = Column(String(100), nullable=False, index=True)
    heuristic = Column(String(10), nullable=False)  # 'ts' or 'sa'
    instance_name = Column(String(100), nullable=False, index=True)
    iterations = Column(BigInteger, nullable=False)
    run_index = Column(Integer, nullable=False)
    seed = Column(String(20), nullable=False)  # unsigned 64-bit, above BIGINT range
    iterations_run = Column(BigInteger, nullable=False)
    total_time_ns = Column(BigInteger, nullable=False)
    final_best_cost = Column(BigInteger, nullable=False)
    targets = Column(JSON, nullable=False)  # [q, ...]
    first_hits = Column(JSON, nullable=False)  # {repr(q): [iteration, elapsed_ns]}
    best_perm = Column(JSON, nullable=False)
    created_at = Column(DateTime(timezone=True), default=_utcnow, nullable=False)


class LogEntry(Base):
    """Experiment logs stored in database"""

    __tablename__ = "log_entries"

    id = Column(Uuid, primary_key=True, default=uuid.uuid4)
    timestamp = Column(DateTime(timezone=True), default=_utcnow, nullable=False, index=True)
    experiment = Column(String(100), nullable=True, index=True)
    level = Column(String(20), nullable=False, index=True)
    logger_name = Column(String(100), nullable=False)
    message = Column(Text, nullable=False)
    module = Column(String(100), nullable=True, index=True)
    function = Column(String(100), nullable=True)
    line_number = Column(Integer, nullable=True)
    exception_info = Column(Text, nullable=True)
    extra_data = Column(JSON, nullable=True)
