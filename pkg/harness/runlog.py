"""Newline-delimited run logs

The first line is a header naming the schema and its version; every further
line is one run. Files may be appended to; a damaged line (for example a
truncated final line after an interrupted write) is skipped with a warning.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Tuple, Union

from pydantic import BaseModel, ValidationError

from harness.multistart import RunSet
from heuristics.records import FirstHit, Heuristic, RunRecord
from qap.errors import RunLogError

logger = logging.getLogger(__name__)

SCHEMA_NAME = "qap-runlog"
SCHEMA_VERSION = 1


class HeaderLine(BaseModel):
    kind: Literal["header"] = "header"
    schema_name: str = SCHEMA_NAME
    version: int = SCHEMA_VERSION


class HitEntry(BaseModel):
    iteration: int
    elapsed_ns: int


class RunLine(BaseModel):
    """Serialised RunRecord"""

    kind: Literal["run"] = "run"
    run: int
    heuristic: Heuristic
    instance: str
    seed: int
    iterations: int
    iterations_run: int
    iteration_semantics: str
    total_time_ns: int
    final_best_cost: int
    targets: List[float]
    first_hits: Dict[str, HitEntry]
    best_perm: List[int]

    @classmethod
    def from_record(cls, index: int, record: RunRecord) -> "RunLine":
        return cls(
            run=index,
            heuristic=record.heuristic,
            instance=record.instance_name,
            seed=record.seed,
            iterations=record.iterations,
            iterations_run=record.iterations_run,
            iteration_semantics=record.iteration_semantics.value,
            total_time_ns=record.total_time_ns,
            final_best_cost=record.final_best_cost,
            targets=list(record.targets),
            first_hits={
                repr(q): HitEntry(iteration=hit.iteration, elapsed_ns=hit.elapsed_ns)
                for q, hit in sorted(record.first_hits.items())
            },
            best_perm=list(record.best_perm),
        )

    def to_record(self) -> RunRecord:
        return RunRecord(
            heuristic=self.heuristic,
            instance_name=self.instance,
            seed=self.seed,
            iterations=self.iterations,
            iterations_run=self.iterations_run,
            total_time_ns=self.total_time_ns,
            final_best_cost=self.final_best_cost,
            targets=tuple(self.targets),
            first_hits={
                float(q): FirstHit(iteration=hit.iteration, elapsed_ns=hit.elapsed_ns)
                for q, hit in self.first_hits.items()
            },
            best_perm=tuple(self.best_perm),
        )


def persist_runs(runset: RunSet, path: Union[str, Path], append: bool = True) -> int:
    """
    Write a RunSet to a run log, creating the header when the file is new.

    Returns:
        Number of run lines written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not append or not path.exists() or path.stat().st_size == 0
    existing = b"" if fresh else path.read_bytes()
    # A damaged tail must not swallow the first appended record
    needs_break = not fresh and not existing.endswith(b"\n")
    # Appended runs continue the numbering after the lines already present
    offset = 0 if fresh else sum(1 for line in existing.splitlines()[1:] if line.strip())

    with open(path, "w" if fresh else "a", encoding="utf-8") as fh:
        if fresh:
            fh.write(HeaderLine().model_dump_json() + "\n")
        elif needs_break:
            fh.write("\n")
        for index, record in enumerate(runset.records, start=offset):
            fh.write(RunLine.from_record(index, record).model_dump_json() + "\n")

    logger.debug(f"Wrote {runset.n_runs} runs to {path}")
    return runset.n_runs


def _check_header(line: str, path: Path):
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as e:
        raise RunLogError(f"{path}: header line is not JSON ({e})") from e
    if not isinstance(raw, dict) or raw.get("kind") != "header" or raw.get("schema_name") != SCHEMA_NAME:
        raise RunLogError(f"{path}: not a {SCHEMA_NAME} file")
    if raw.get("version") != SCHEMA_VERSION:
        raise RunLogError(
            f"{path}: schema version {raw.get('version')} is not supported (expected {SCHEMA_VERSION})"
        )


def read_run_log(path: Union[str, Path]) -> Tuple[RunSet, int]:
    """
    Load a run log.

    Returns:
        The RunSet and the number of damaged lines that were skipped

    Raises:
        RunLogError: missing or mismatched header, no valid runs, or runs
            from different (heuristic, instance, I) cells
    """
    path = Path(path)
    lines = path.read_bytes().decode("utf-8", errors="replace").splitlines()
    if not lines:
        raise RunLogError(f"{path}: empty run log")
    _check_header(lines[0], path)

    records: List[RunRecord] = []
    skipped = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            records.append(RunLine.model_validate_json(line).to_record())
        except ValidationError as e:
            skipped += 1
            logger.warning(f"{path}:{lineno}: skipping damaged run line ({e.error_count()} errors)")

    if skipped:
        logger.warning(f"{path}: skipped {skipped} damaged line(s), kept {len(records)} runs")
    if not records:
        raise RunLogError(f"{path}: no valid runs")

    first = records[0]
    try:
        runset = RunSet(
            heuristic=first.heuristic,
            instance_name=first.instance_name,
            iterations=first.iterations,
            records=records,
        )
    except ValueError as e:
        raise RunLogError(f"{path}: {e}") from e
    return runset, skipped


def load_runs(path: Union[str, Path]) -> RunSet:
    """Load a run log, dropping damaged lines"""
    runset, _ = read_run_log(path)
    return runset
