"""Run records shared by both heuristics and the harness"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from qap.errors import MissingBestKnownError
from qap.instance import Instance, cost_threshold


class Heuristic(Enum):
    """Heuristic selector"""
    TS = "ts"
    SA = "sa"


class IterationSemantics(Enum):
    """What one unit of the iteration budget means for a heuristic"""
    NEIGHBORHOOD_SCAN = "neighborhood_scan"
    SINGLE_TRIAL = "single_trial"


SEMANTICS = {
    Heuristic.TS: IterationSemantics.NEIGHBORHOOD_SCAN,
    Heuristic.SA: IterationSemantics.SINGLE_TRIAL,
}


@dataclass(frozen=True)
class FirstHit:
    """Iteration and elapsed loop time at which a quality target was first met"""
    iteration: int
    elapsed_ns: int


@dataclass
class RunRecord:
    """One heuristic run"""

    heuristic: Heuristic
    instance_name: str
    seed: int
    iterations: int
    total_time_ns: int
    final_best_cost: int
    targets: Tuple[float, ...] = ()
    first_hits: Dict[float, FirstHit] = field(default_factory=dict)
    iterations_run: Optional[int] = None
    best_perm: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.iterations_run is None:
            self.iterations_run = self.iterations

    @property
    def iteration_semantics(self) -> IterationSemantics:
        return SEMANTICS[self.heuristic]

    @property
    def total_time(self) -> float:
        """Loop time in seconds"""
        return self.total_time_ns / 1e9

    def hit(self, q: float) -> bool:
        return q in self.first_hits

    def iteration_fields(self) -> tuple:
        """Everything except timings, for determinism comparisons"""
        return (
            self.heuristic,
            self.instance_name,
            self.seed,
            self.iterations,
            self.iterations_run,
            self.final_best_cost,
            self.targets,
            tuple(sorted((q, h.iteration) for q, h in self.first_hits.items())),
            self.best_perm,
        )


class HitTracker:
    """
    Records the first iteration at which the best-so-far cost meets each target.

    Targets are compiled once into integer cost thresholds. The compiled
    loops stop at next_threshold and hand the new best back to observe().
    Elapsed times count from start(), called once initialisation is done.
    """

    def __init__(self, instance: Instance, targets: Sequence[float]):
        self.targets = tuple(sorted(float(q) for q in targets))
        if self.targets and instance.best_known is None:
            raise MissingBestKnownError(
                f"Quality targets {list(self.targets)} need a best-known cost for {instance.name}"
            )
        # Loosest target first; hits happen in that order as the best cost falls
        self._pending: List[Tuple[int, float]] = sorted(
            ((cost_threshold(q, instance.best_known), q) for q in self.targets),
            reverse=True,
        )
        self.first_hits: Dict[float, FirstHit] = {}
        self.start_ns = time.perf_counter_ns()

    def start(self) -> int:
        """Reset the run clock to now and return it"""
        self.start_ns = time.perf_counter_ns()
        return self.start_ns

    @property
    def next_threshold(self) -> Optional[int]:
        """Cost at or below which the next pending target is hit"""
        return self._pending[0][0] if self._pending else None

    @property
    def done(self) -> bool:
        return not self._pending

    def observe(self, best_cost: int, iteration: int):
        """Call whenever the best-so-far cost improves (and once at the start)"""
        if not self._pending or best_cost > self._pending[0][0]:
            return
        now = time.perf_counter_ns()
        while self._pending and best_cost <= self._pending[0][0]:
            _, q = self._pending.pop(0)
            self.first_hits[q] = FirstHit(iteration=iteration, elapsed_ns=now - self.start_ns)
