"""Sweep orchestration: run-log cells on disk, resume, and table output

Layout under the output directory:
    runs/<instance>/<heuristic>_I<budget>.jsonl   one run log per grid cell
    <instance>_<heuristic>_surface.csv           T̄(Q, I) for every cell
    <instance>_<heuristic>_curve.csv             T̄(Q), I_opt(Q)
"""

import json
import logging
from collections import defaultdict
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

from harness.metrics import DEFAULT_GRIDS, SweepResult, curve_from_runsets, iteration_sweep
from harness.multistart import RunSet, multi_start, seed_derive
from harness.runlog import persist_runs, read_run_log
from harness.tables import write_curve_table, write_surface_table
from heuristics.records import Heuristic
from qap.errors import QAPError, RunLogError
from qap.instance import Instance, best_known

logger = logging.getLogger(__name__)


class ExperimentSpec(BaseModel):
    """Everything that determines a sweep's non-timing output"""

    heuristics: List[Heuristic] = Field(default_factory=lambda: [Heuristic.TS, Heuristic.SA])
    grids: Dict[Heuristic, List[int]] = Field(default_factory=dict)
    n_runs: int = Field(default=10, ge=1)
    base_seed: int = Field(default=0, ge=0)
    targets: List[float] = Field(default_factory=lambda: [0.05, 0.02, 0.01, 0.005, 0.0])
    out_dir: Path = Path("results")
    workers: int = Field(default=1, ge=1)
    truncate_at_hit: bool = False

    @field_validator("grids")
    @classmethod
    def _grids_sorted(cls, grids: Dict[Heuristic, List[int]]) -> Dict[Heuristic, List[int]]:
        for heuristic, grid in grids.items():
            if not grid:
                raise ValueError(f"Iteration grid for {heuristic.value} is empty")
            if any(i < 0 for i in grid):
                raise ValueError(f"Iteration grid for {heuristic.value} has negative budgets")
        return {heuristic: sorted(set(grid)) for heuristic, grid in grids.items()}

    @field_validator("targets")
    @classmethod
    def _targets_sorted(cls, targets: List[float]) -> List[float]:
        if any(q < 0 for q in targets):
            raise ValueError("Quality targets must be >= 0")
        return sorted(set(targets))

    def grid_for(self, heuristic: Heuristic) -> List[int]:
        return self.grids.get(heuristic) or DEFAULT_GRIDS[heuristic]

    def echo(self) -> str:
        """Compact JSON of the settings, for table headers"""
        payload = self.model_dump(mode="json", exclude={"out_dir", "workers"})
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def cell_log_path(out_dir: Path, instance_name: str, heuristic: Heuristic, iterations: int) -> Path:
    return Path(out_dir) / "runs" / instance_name / f"{heuristic.value}_I{iterations}.jsonl"


def curve_table_path(out_dir: Path, instance_name: str, heuristic: Heuristic) -> Path:
    return Path(out_dir) / f"{instance_name}_{heuristic.value}_curve.csv"


def surface_table_path(out_dir: Path, instance_name: str, heuristic: Heuristic) -> Path:
    return Path(out_dir) / f"{instance_name}_{heuristic.value}_surface.csv"


def _completed_cell(path: Path, spec: ExperimentSpec, expected: RunSet) -> Optional[RunSet]:
    """The stored RunSet when it matches this cell exactly, else None"""
    if not path.exists():
        return None
    try:
        stored, skipped = read_run_log(path)
    except (RunLogError, OSError) as e:
        logger.warning(f"Ignoring unusable run log {path}: {e}")
        return None

    seeds = [seed_derive(spec.base_seed, k) for k in range(spec.n_runs)]
    if (
        skipped
        or stored.heuristic is not expected.heuristic
        or stored.instance_name != expected.instance_name
        or stored.iterations != expected.iterations
        or [r.seed for r in stored.records] != seeds
        or any(not set(spec.targets) <= set(r.targets) for r in stored.records)
    ):
        logger.info(f"Run log {path} does not match the requested cell; rerunning")
        return None
    return stored


def run_sweep(
    spec: ExperimentSpec,
    instance: Instance,
    on_runset: Optional[Callable[[RunSet], None]] = None,
) -> Dict[Heuristic, SweepResult]:
    """
    Run every (heuristic, budget) cell for one instance, reusing finished cells.

    Args:
        spec: Experiment settings
        instance: Instance to sweep
        on_runset: Called with each freshly computed RunSet (e.g. archiving)
    """
    if spec.targets and instance.best_known is None:
        raise QAPError(f"Instance {instance.name} has no best-known cost; quality targets cannot be scored")

    results: Dict[Heuristic, SweepResult] = {}
    for heuristic in spec.heuristics:

        def source(iterations: int, heuristic: Heuristic = heuristic) -> RunSet:
            path = cell_log_path(spec.out_dir, instance.name, heuristic, iterations)
            expected = RunSet(heuristic=heuristic, instance_name=instance.name, iterations=iterations)
            stored = _completed_cell(path, spec, expected)
            if stored is not None:
                logger.info(f"Skipping completed cell {heuristic.value.upper()} I={iterations} ({path})")
                return stored
            runset = multi_start(
                heuristic,
                instance,
                iterations,
                spec.n_runs,
                spec.base_seed,
                spec.targets,
                spec.workers,
                spec.truncate_at_hit,
            )
            persist_runs(runset, path, append=False)
            if on_runset is not None:
                on_runset(runset)
            return runset

        result = iteration_sweep(
            heuristic,
            instance,
            spec.grid_for(heuristic),
            spec.n_runs,
            spec.base_seed,
            spec.targets,
            workers=spec.workers,
            truncate_at_hit=spec.truncate_at_hit,
            runset_source=source,
        )
        write_tables(result, spec)
        results[heuristic] = result
    return results


def write_tables(result: SweepResult, spec: ExperimentSpec):
    meta = {"seed": spec.base_seed, "spec": spec.echo()}
    write_surface_table(
        result.surface,
        surface_table_path(spec.out_dir, result.instance_name, result.heuristic),
        instance=result.instance_name,
        heuristic=result.heuristic.value,
        **meta,
    )
    write_curve_table(result.curve, curve_table_path(spec.out_dir, result.instance_name, result.heuristic), **meta)


def curves_from_log_dir(log_dir: Path, targets: Optional[List[float]] = None) -> List[SweepResult]:
    """
    Rebuild surfaces and curves from every run log under log_dir.

    Without explicit targets, the Q values recorded by every run are used.
    """
    cells: Dict[tuple, List[RunSet]] = defaultdict(list)
    for path in sorted(Path(log_dir).rglob("*.jsonl")):
        runset, _ = read_run_log(path)
        cells[(runset.instance_name, runset.heuristic)].append(runset)

    if not cells:
        raise RunLogError(f"No run logs found under {log_dir}")

    results = []
    for (instance_name, heuristic), runsets in sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        runsets.sort(key=lambda rs: rs.iterations)
        qs = targets
        if qs is None:
            common = None
            for runset in runsets:
                for record in runset.records:
                    common = set(record.targets) if common is None else common & set(record.targets)
            qs = sorted(common or [])
        results.append(curve_from_runsets(heuristic, instance_name, runsets, qs, best_known(instance_name)))
    return results
