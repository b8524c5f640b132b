"""Robust tabu search over the swap neighbourhood

Each iteration scans all N(N-1)/2 swaps through the delta table and makes the
best admissible one. A swap is tabu when both facilities would move back onto
locations they left too recently; the ban length is drawn uniformly from
[0.9N, 1.1N] for every cell and move. Aspiration admits a tabu swap that
gives a new best cost, or that places a facility on a location it has not
occupied for more than 2N² iterations.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np
from numba import njit

from heuristics.records import Heuristic, HitTracker, RunRecord
from qap.evaluation import DeltaTable, build_delta_table, cost, swap_with_table_kernel
from qap.instance import Instance

logger = logging.getLogger(__name__)

# Tenure pairs drawn per call into the compiled loop
ITERATION_CHUNK = 4096

MOVE_KINDS = ("admissible", "aspired", "fallback")

_NO_MOVE = int(np.iinfo(np.int64).max)
_NO_THRESHOLD = int(np.iinfo(np.int64).min)


@dataclass
class TabuConfig:
    """Tabu search parameters; defaults are the published robust settings"""

    iterations: int
    seed: int = 0
    tenure_low_factor: float = 0.9
    tenure_high_factor: float = 1.1
    aspiration_factor: float = 2.0
    aspiration_priority: bool = False

    def __post_init__(self):
        if not 0 < self.tenure_low_factor <= self.tenure_high_factor:
            raise ValueError(
                f"Tenure factors must satisfy 0 < low <= high, got {self.tenure_low_factor}, {self.tenure_high_factor}"
            )
        if self.iterations < 0:
            raise ValueError(f"Iterations must be >= 0, got {self.iterations}")

    def tenure_bounds(self, n: int) -> Tuple[int, int]:
        """Inclusive integer range of tenures for size n"""
        low = math.ceil(Fraction(str(self.tenure_low_factor)) * n)
        high = math.floor(Fraction(str(self.tenure_high_factor)) * n)
        low = max(low, 1)
        return low, max(low, high)

    def aspiration(self, n: int) -> int:
        return int(self.aspiration_factor * n * n)


@dataclass
class TabuTable:
    """
    eligible[f][loc]: first iteration at which facility f may again be placed on loc.
    last_occupied[f][loc]: last iteration at which f left loc (0 = never since start).
    """

    eligible: np.ndarray
    last_occupied: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "TabuTable":
        return cls(
            eligible=np.zeros((n, n), dtype=np.int64),
            last_occupied=np.zeros((n, n), dtype=np.int64),
        )


@dataclass(frozen=True)
class MoveRecord:
    """The swap executed by one tabu step"""

    i: int
    j: int
    delta: int
    kind: str  # "admissible", "aspired" or "fallback"
    tenures: Tuple[int, int]


@dataclass
class TabuState:
    """Mutable state of a single tabu search run"""

    instance: Instance
    config: TabuConfig
    rng: np.random.Generator
    perm: np.ndarray
    cost: int
    best_cost: int
    best_perm: np.ndarray
    table: DeltaTable
    tabu: TabuTable
    iteration: int = 0
    improved: bool = False
    last_move: Optional[MoveRecord] = None
    upper: np.ndarray = field(default=None, repr=False)
    tenure_low: int = 0
    tenure_high: int = 0
    aspiration: int = 0


def init_tabu_state(instance: Instance, config: TabuConfig, perm: Optional[Sequence[int]] = None) -> TabuState:
    """Random start (Fisher-Yates from the seeded generator) unless perm is given"""
    rng = np.random.default_rng(config.seed)
    n = instance.n
    start = rng.permutation(n).astype(np.int64) if perm is None else np.array(perm, dtype=np.int64)
    start_cost = cost(instance, start)
    low, high = config.tenure_bounds(n)
    return TabuState(
        instance=instance,
        config=config,
        rng=rng,
        perm=start,
        cost=start_cost,
        best_cost=start_cost,
        best_perm=start.copy(),
        table=build_delta_table(instance, start),
        tabu=TabuTable.empty(n),
        upper=np.triu(np.ones((n, n), dtype=bool), k=1),
        tenure_low=low,
        tenure_high=high,
        aspiration=config.aspiration(n),
    )


@njit(cache=True)
def tabu_move_kernel(f, d, perm, table, eligible, last_occupied, k, current, best,
                     aspiration, priority, t_i, t_j):
    """
    Select and make the move completing iteration k + 1.

    Returns (i, j, delta, kind, new cost) with kind a MOVE_KINDS index.
    Ties go to the first pair in (i, j) row-major order.
    """
    n = perm.shape[0]
    horizon = k - aspiration
    adm_delta = _NO_MOVE
    adm_i = -1
    adm_j = -1
    adm_tabu = False
    asp_delta = _NO_MOVE
    asp_i = -1
    asp_j = -1
    any_delta = _NO_MOVE
    any_i = 0
    any_j = 1
    for i in range(n - 1):
        pi = perm[i]
        for j in range(i + 1, n):
            pj = perm[j]
            delta = table[i, j]
            if delta < any_delta:
                any_delta = delta
                any_i = i
                any_j = j
            # i would take j's location and j would take i's
            tabu = eligible[i, pj] > k and eligible[j, pi] > k
            aspired = (
                current + delta < best
                or last_occupied[i, pj] < horizon
                or last_occupied[j, pi] < horizon
            )
            if aspired and delta < asp_delta:
                asp_delta = delta
                asp_i = i
                asp_j = j
            if (not tabu or aspired) and delta < adm_delta:
                adm_delta = delta
                adm_i = i
                adm_j = j
                adm_tabu = tabu

    if priority and asp_i >= 0:
        i, j, kind = asp_i, asp_j, 1
    elif adm_i >= 0:
        i, j = adm_i, adm_j
        kind = 1 if adm_tabu else 0
    else:
        i, j, kind = any_i, any_j, 2

    delta = table[i, j]
    old_i = perm[i]
    old_j = perm[j]
    current = swap_with_table_kernel(f, d, perm, table, current, i, j)
    now = k + 1
    eligible[i, old_i] = max(eligible[i, old_i], now + t_i)
    eligible[j, old_j] = max(eligible[j, old_j], now + t_j)
    last_occupied[i, old_i] = now
    last_occupied[j, old_j] = now
    return i, j, delta, kind, current


@njit(cache=True)
def tabu_kernel(f, d, perm, best_perm, table, eligible, last_occupied, k, current, best,
                aspiration, priority, tenures, threshold):
    """
    One iteration per row of tenures, or stop right after a new best at or
    below threshold. Returns (iterations done, k, cost, best cost).
    """
    done = 0
    for step in range(tenures.shape[0]):
        _, _, _, _, current = tabu_move_kernel(
            f, d, perm, table, eligible, last_occupied, k, current, best,
            aspiration, priority, tenures[step, 0], tenures[step, 1],
        )
        k += 1
        done = step + 1
        if current < best:
            best = current
            best_perm[:] = perm
            if best <= threshold:
                break
    return done, k, current, best


def tabu_step(state: TabuState) -> TabuState:
    """Perform one iteration: select, apply, update tabu table and best"""
    n = state.instance.n
    state.improved = False
    if n < 2:
        state.iteration += 1
        state.last_move = None
        return state

    t_i, t_j = (int(t) for t in state.rng.integers(state.tenure_low, state.tenure_high + 1, size=2))
    i, j, delta, kind, current = tabu_move_kernel(
        state.instance.flow, state.instance.dist, state.perm, state.table.delta,
        state.tabu.eligible, state.tabu.last_occupied, state.iteration, state.cost, state.best_cost,
        state.aspiration, state.config.aspiration_priority, t_i, t_j,
    )
    state.iteration += 1
    state.cost = int(current)

    if state.cost < state.best_cost:
        state.best_cost = state.cost
        state.best_perm = state.perm.copy()
        state.improved = True

    state.last_move = MoveRecord(i=int(i), j=int(j), delta=int(delta), kind=MOVE_KINDS[kind], tenures=(t_i, t_j))
    return state


def run_tabu(
    instance: Instance,
    config: TabuConfig,
    quality_targets: Sequence[float] = (),
    truncate_at_hit: bool = False,
) -> RunRecord:
    """
    One tabu search run of config.iterations iterations.

    The run clock covers the iteration loop only; the start permutation and
    the delta table are built before it.

    Args:
        instance: Problem instance
        config: Budget, seed and tabu parameters
        quality_targets: Q values whose first hits are recorded
        truncate_at_hit: Stop as soon as every target has been hit

    Raises:
        MissingBestKnownError: targets given for an instance without C_best
    """
    tracker = HitTracker(instance, quality_targets)
    state = init_tabu_state(instance, config)
    f, d = instance.flow, instance.dist
    priority = config.aspiration_priority

    def stop() -> bool:
        return truncate_at_hit and bool(tracker.targets) and tracker.done

    def advance(tenures: np.ndarray, threshold: int) -> int:
        done, state.iteration, state.cost, state.best_cost = tabu_kernel(
            f, d, state.perm, state.best_perm, state.table.delta, state.tabu.eligible,
            state.tabu.last_occupied, state.iteration, state.cost, state.best_cost,
            state.aspiration, priority, tenures, threshold,
        )
        return done

    if instance.n >= 2:
        # compile or load the kernel outside the clock
        advance(np.empty((0, 2), dtype=np.int64), _NO_THRESHOLD)

    start_ns = tracker.start()
    tracker.observe(state.best_cost, 0)

    if instance.n < 2:
        if not stop():
            state.iteration = config.iterations
    while instance.n >= 2 and state.iteration < config.iterations and not stop():
        count = min(ITERATION_CHUNK, config.iterations - state.iteration)
        tenures = state.rng.integers(state.tenure_low, state.tenure_high + 1, size=(count, 2), dtype=np.int64)
        pos = 0
        while pos < count and not stop():
            threshold = tracker.next_threshold
            pos += advance(tenures[pos:], _NO_THRESHOLD if threshold is None else threshold)
            tracker.observe(state.best_cost, state.iteration)

    total_ns = time.perf_counter_ns() - start_ns
    state.best_cost = int(state.best_cost)
    logger.debug(
        f"TS {instance.name} seed={config.seed}: best {state.best_cost} after {state.iteration} iterations "
        f"in {total_ns / 1e9:.3f}s"
    )
    return RunRecord(
        heuristic=Heuristic.TS,
        instance_name=instance.name,
        seed=config.seed,
        iterations=config.iterations,
        iterations_run=int(state.iteration),
        total_time_ns=total_ns,
        final_best_cost=state.best_cost,
        targets=tracker.targets,
        first_hits=dict(tracker.first_hits),
        best_perm=tuple(int(v) for v in state.best_perm),
    )
