"""Tabu search and simulated annealing for the QAP"""

from heuristics.records import Heuristic, IterationSemantics, FirstHit, RunRecord, HitTracker
from heuristics.tabu import TabuConfig, TabuTable, TabuState, MoveRecord, init_tabu_state, tabu_step, run_tabu
from heuristics.annealing import (
    FreezeRule,
    SAConfig,
    CoolingState,
    init_cooling,
    cool_step,
    accept,
    run_sa,
)

__all__ = [
    "Heuristic",
    "IterationSemantics",
    "FirstHit",
    "RunRecord",
    "HitTracker",
    "TabuConfig",
    "TabuTable",
    "TabuState",
    "MoveRecord",
    "init_tabu_state",
    "tabu_step",
    "run_tabu",
    "FreezeRule",
    "SAConfig",
    "CoolingState",
    "init_cooling",
    "cool_step",
    "accept",
    "run_sa",
]
