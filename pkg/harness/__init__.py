"""Benchmark harness: multi-start runs, time-to-quality curves and crossover"""

from harness.multistart import RunSet, default_workers, multi_start, run_heuristic, seed_derive
from harness.metrics import (
    DEFAULT_GRIDS,
    CurvePoint,
    QualityCurve,
    Surface,
    SurfacePoint,
    SweepResult,
    curve_from_runsets,
    iteration_sweep,
    n_success,
    select_optimal,
    surface_from_runsets,
    t_bar,
)
from harness.crossover import CrossoverReport, crossover
from harness.runlog import load_runs, persist_runs, read_run_log
from harness.experiment import ExperimentSpec, curves_from_log_dir, run_sweep

__all__ = [
    "RunSet",
    "default_workers",
    "multi_start",
    "run_heuristic",
    "seed_derive",
    "DEFAULT_GRIDS",
    "CurvePoint",
    "QualityCurve",
    "Surface",
    "SurfacePoint",
    "SweepResult",
    "curve_from_runsets",
    "iteration_sweep",
    "n_success",
    "select_optimal",
    "surface_from_runsets",
    "t_bar",
    "CrossoverReport",
    "crossover",
    "load_runs",
    "persist_runs",
    "read_run_log",
    "ExperimentSpec",
    "curves_from_log_dir",
    "run_sweep",
]
