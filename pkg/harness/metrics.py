"""Time-to-quality metric, iteration sweeps and quality curves

T̄(Q, I) is the summed loop time of every run at budget I (failures included)
divided by the number of runs that reached quality Q. It is undefined when no
run succeeded. I_opt(Q) is the grid budget minimising T̄(Q, I), and T̄(Q) is
that minimum.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from harness.multistart import RunSet, multi_start
from heuristics.records import Heuristic
from qap.errors import UnknownTargetError
from qap.instance import Instance

logger = logging.getLogger(__name__)

# Grids used for the published comparison
DEFAULT_GRIDS = {
    Heuristic.SA: [10**6, 5 * 10**6, 10**7, 5 * 10**7, 10**8, 5 * 10**8, 10**9],
    Heuristic.TS: [10**3, 5 * 10**3, 10**4, 5 * 10**4, 10**5, 5 * 10**5, 10**6],
}


@dataclass(frozen=True)
class SurfacePoint:
    """T̄(Q, I) for one grid cell; t_bar is None when no run reached Q"""
    t_bar: Optional[float]
    n_success: int
    n_runs: int


@dataclass(frozen=True)
class CurvePoint:
    t_bar: float
    i_opt: int
    n_success: int
    n_runs: int


# surface[q][iterations]
Surface = Dict[float, Dict[int, SurfacePoint]]


@dataclass
class QualityCurve:
    """T̄(Q) and I_opt(Q) for one heuristic on one instance"""

    heuristic: Heuristic
    instance_name: str
    points: Dict[float, CurvePoint] = field(default_factory=dict)
    best_known: Optional[int] = None

    def qualities(self) -> List[float]:
        return sorted(self.points)


@dataclass
class SweepResult:
    heuristic: Heuristic
    instance_name: str
    runsets: List[RunSet]
    surface: Surface
    curve: QualityCurve


def n_success(runset: RunSet, q: float) -> int:
    """N(Q, I): runs whose best cost reached quality q"""
    for record in runset.records:
        if q not in record.targets:
            raise UnknownTargetError(f"Quality target {q} was not recorded for run seed={record.seed}")
    return sum(1 for record in runset.records if record.hit(q))


def t_bar(runset: RunSet, q: float) -> Optional[float]:
    """
    T̄(Q, I) in seconds, or None when no run reached q.

    Raises:
        UnknownTargetError: q was not among the targets the runs recorded
    """
    successes = n_success(runset, q)
    if successes == 0:
        return None
    total_ns = sum(record.total_time_ns for record in runset.records)
    return total_ns / successes / 1e9


def surface_point(runset: RunSet, q: float) -> SurfacePoint:
    return SurfacePoint(t_bar=t_bar(runset, q), n_success=n_success(runset, q), n_runs=runset.n_runs)


def surface_from_runsets(runsets: Sequence[RunSet], targets: Sequence[float]) -> Surface:
    """T̄(Q, I) for every target and every RunSet budget"""
    surface: Surface = {}
    for q in sorted(targets):
        surface[q] = {runset.iterations: surface_point(runset, q) for runset in runsets}
    return surface


def select_optimal(surface: Surface) -> Dict[float, CurvePoint]:
    """
    Pick I_opt(Q) and T̄(Q) from a surface.

    Undefined cells are skipped; ties go to the smaller budget; qualities with
    no defined cell are left out.
    """
    points: Dict[float, CurvePoint] = {}
    for q, row in surface.items():
        best: Optional[CurvePoint] = None
        for iterations in sorted(row):
            cell = row[iterations]
            if cell.t_bar is None:
                continue
            if best is None or cell.t_bar < best.t_bar:
                best = CurvePoint(t_bar=cell.t_bar, i_opt=iterations, n_success=cell.n_success, n_runs=cell.n_runs)
        if best is not None:
            points[q] = best
    return points


def curve_from_runsets(
    heuristic: Heuristic,
    instance_name: str,
    runsets: Sequence[RunSet],
    targets: Sequence[float],
    best_known: Optional[int] = None,
) -> SweepResult:
    surface = surface_from_runsets(runsets, targets)
    curve = QualityCurve(
        heuristic=heuristic,
        instance_name=instance_name,
        points=select_optimal(surface),
        best_known=best_known,
    )
    return SweepResult(
        heuristic=heuristic,
        instance_name=instance_name,
        runsets=list(runsets),
        surface=surface,
        curve=curve,
    )


def iteration_sweep(
    heuristic: Heuristic,
    instance: Instance,
    grid: Sequence[int],
    n_runs: int,
    base_seed: int,
    targets: Sequence[float],
    workers: Optional[int] = 1,
    truncate_at_hit: bool = False,
    runset_source: Optional[Callable[[int], RunSet]] = None,
) -> SweepResult:
    """
    Run a multi-start set at every budget in grid and derive the quality curve.

    Every budget uses the same base seed. runset_source, when given, supplies
    the RunSet for a budget instead of running it (used to resume sweeps).
    """
    if not grid:
        raise ValueError("Iteration grid must not be empty")
    if list(grid) != sorted(grid):
        raise ValueError(f"Iteration grid must be sorted ascending, got {list(grid)}")

    runsets = []
    for iterations in grid:
        if runset_source is not None:
            runset = runset_source(iterations)
        else:
            runset = multi_start(
                heuristic, instance, iterations, n_runs, base_seed, targets, workers, truncate_at_hit
            )
        runsets.append(runset)

    result = curve_from_runsets(heuristic, instance.name, runsets, targets, instance.best_known)
    for q, point in sorted(result.curve.points.items()):
        logger.info(
            f"{heuristic.value.upper()} {instance.name} Q={q}: T̄={point.t_bar:.4g}s at I_opt={point.i_opt} "
            f"({point.n_success}/{point.n_runs} runs)"
        )
    return result
