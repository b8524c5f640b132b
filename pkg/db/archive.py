"""Storing and reloading run sets in the archive database"""

import logging

from sqlalchemy import delete, select
from sqlalchemy.engine import Engine

from db.database import get_sync_session
from db.models import RunRow
from harness.multistart import RunSet
from heuristics.records import FirstHit, Heuristic, RunRecord
from qap.errors import RunLogError

logger = logging.getLogger(__name__)


def _to_row(experiment: str, index: int, record: RunRecord) -> RunRow:
    return RunRow(
        experiment=experiment,
        heuristic=record.heuristic.value,
        instance_name=record.instance_name,
        iterations=record.iterations,
        run_index=index,
        seed=str(record.seed),
        iterations_run=record.iterations_run,
        total_time_ns=record.total_time_ns,
        final_best_cost=record.final_best_cost,
        targets=list(record.targets),
        first_hits={repr(q): [hit.iteration, hit.elapsed_ns] for q, hit in record.first_hits.items()},
        best_perm=list(record.best_perm),
    )


def _to_record(row: RunRow) -> RunRecord:
    return RunRecord(
        heuristic=Heuristic(row.heuristic),
        instance_name=row.instance_name,
        seed=int(row.seed),
        iterations=row.iterations,
        iterations_run=row.iterations_run,
        total_time_ns=row.total_time_ns,
        final_best_cost=row.final_best_cost,
        targets=tuple(row.targets),
        first_hits={float(q): FirstHit(iteration=it, elapsed_ns=ns) for q, (it, ns) in row.first_hits.items()},
        best_perm=tuple(row.best_perm),
    )


def archive_runset(runset: RunSet, experiment: str, engine: Engine) -> int:
    """
    Store a RunSet under an experiment label, replacing an earlier copy of the same cell.

    Returns:
        Number of rows written
    """
    with get_sync_session(engine) as session:
        session.execute(
            delete(RunRow).where(
                RunRow.experiment == experiment,
                RunRow.heuristic == runset.heuristic.value,
                RunRow.instance_name == runset.instance_name,
                RunRow.iterations == runset.iterations,
            )
        )
        session.add_all(_to_row(experiment, index, record) for index, record in enumerate(runset.records))

    logger.info(
        f"Archived {runset.n_runs} {runset.heuristic.value.upper()} runs for "
        f"{runset.instance_name} I={runset.iterations} under '{experiment}'"
    )
    return runset.n_runs


def load_archived_runset(
    experiment: str,
    heuristic: Heuristic,
    instance_name: str,
    iterations: int,
    engine: Engine,
) -> RunSet:
    """
    Reload one archived cell in run-index order.

    Raises:
        RunLogError: nothing archived for that cell
    """
    with get_sync_session(engine) as session:
        rows = session.scalars(
            select(RunRow)
            .where(
                RunRow.experiment == experiment,
                RunRow.heuristic == heuristic.value,
                RunRow.instance_name == instance_name,
                RunRow.iterations == iterations,
            )
            .order_by(RunRow.run_index)
        ).all()
        records = [_to_record(row) for row in rows]

    if not records:
        raise RunLogError(
            f"No archived runs for {heuristic.value} {instance_name} I={iterations} in experiment '{experiment}'"
        )
    return RunSet(heuristic=heuristic, instance_name=instance_name, iterations=iterations, records=records)
