"""Multi-start execution with reproducible per-run seeds"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from heuristics.annealing import SAConfig, run_sa
from heuristics.records import Heuristic, RunRecord
from heuristics.tabu import TabuConfig, run_tabu
from qap.instance import Instance

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def seed_derive(base_seed: int, k: int) -> int:
    """
    Seed of run k in an experiment.

    SplitMix64: the counter base + (k+1)·γ is injective in k (γ is odd) and the
    finaliser is a bijection on 64-bit words, so distinct runs never share a seed.
    """
    z = (base_seed + (k + 1) * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def default_workers() -> int:
    """Worker cap from QAP_WORKERS, else the CPU count"""
    return max(1, int(os.getenv("QAP_WORKERS", str(os.cpu_count() or 1))))


@dataclass
class RunSet:
    """Runs sharing heuristic, instance and iteration budget, in run-index order"""

    heuristic: Heuristic
    instance_name: str
    iterations: int
    records: List[RunRecord] = field(default_factory=list)

    def __post_init__(self):
        for record in self.records:
            self._check(record)

    def _check(self, record: RunRecord):
        if (record.heuristic, record.instance_name, record.iterations) != (
            self.heuristic,
            self.instance_name,
            self.iterations,
        ):
            raise ValueError(
                f"Run ({record.heuristic.value}, {record.instance_name}, I={record.iterations}) does not belong "
                f"to RunSet ({self.heuristic.value}, {self.instance_name}, I={self.iterations})"
            )

    def append(self, record: RunRecord):
        self._check(record)
        self.records.append(record)

    @property
    def n_runs(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return len(self.records)


def run_heuristic(
    heuristic: Heuristic,
    instance: Instance,
    iterations: int,
    seed: int,
    targets: Sequence[float] = (),
    truncate_at_hit: bool = False,
) -> RunRecord:
    """Dispatch one run to tabu search or annealing"""
    if heuristic is Heuristic.TS:
        return run_tabu(instance, TabuConfig(iterations=iterations, seed=seed), targets, truncate_at_hit)
    return run_sa(instance, SAConfig(iterations=iterations, seed=seed), targets, truncate_at_hit)


def _execute(task: Tuple) -> RunRecord:
    return run_heuristic(*task)


def multi_start(
    heuristic: Heuristic,
    instance: Instance,
    iterations: int,
    n_runs: int,
    base_seed: int,
    targets: Sequence[float] = (),
    workers: Optional[int] = 1,
    truncate_at_hit: bool = False,
) -> RunSet:
    """
    Execute n_runs independent runs from random starts.

    Run k uses seed_derive(base_seed, k). Records come back in run-index order
    whatever the completion order; any failing run aborts the whole set.

    Args:
        workers: Process cap; 1 runs sequentially in this process, None uses default_workers()
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")

    workers = default_workers() if workers is None else workers
    targets = tuple(targets)
    tasks = [
        (heuristic, instance, iterations, seed_derive(base_seed, k), targets, truncate_at_hit)
        for k in range(n_runs)
    ]

    logger.info(
        f"Multi-start {heuristic.value.upper()} on {instance.name}: I={iterations}, runs={n_runs}, "
        f"base_seed={base_seed}, workers={min(workers, n_runs)}"
    )
    if workers > 1 and n_runs > 1:
        with ProcessPoolExecutor(max_workers=min(workers, n_runs)) as pool:
            records = list(pool.map(_execute, tasks))
    else:
        records = [_execute(task) for task in tasks]

    return RunSet(heuristic=heuristic, instance_name=instance.name, iterations=iterations, records=records)
