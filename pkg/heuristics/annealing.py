"""Connolly-style simulated annealing

Trials walk the unordered facility pairs in a fixed cyclic order. A swap is
accepted when δ < 0, with probability 1/2 when δ = 0, and otherwise when
exp(-δ/T) > r for r uniform in [0, 1). After every trial the temperature
follows the Lundy-Mees recurrence T ← T / (1 + βT), with t0, tf and β taken
from one sweep of deltas at the start permutation. There are no tunable
parameters besides the trial budget.
"""

import logging
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from heuristics.records import Heuristic, HitTracker, RunRecord
from qap.evaluation import as_perm, build_delta_table, cost, swap_delta_kernel
from qap.instance import Instance

logger = logging.getLogger(__name__)

# Uniform draws handed to the compiled loop per call
TRIAL_CHUNK = 1 << 16

_NO_THRESHOLD = int(np.iinfo(np.int64).min)


class FreezeRule(Enum):
    """When the temperature stops decreasing"""
    STALLED_SWEEP = "stalled_sweep"  # lock at T of the last new best after a fully rejected sweep
    NEW_BEST = "new_best"  # lock at the current T on the first new best
    NEVER = "never"


_RULE_CODES = {FreezeRule.STALLED_SWEEP: 0, FreezeRule.NEW_BEST: 1, FreezeRule.NEVER: 2}


@dataclass
class SAConfig:
    """Annealing run parameters: trial budget and seed only"""

    iterations: int
    seed: int = 0
    freeze_rule: FreezeRule = FreezeRule.STALLED_SWEEP

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError(f"Iterations must be >= 0, got {self.iterations}")


@dataclass
class CoolingState:
    t: float
    beta: float
    t0: float
    tf: float
    frozen: bool = False
    t_found: float = 0.0
    freeze_rule: FreezeRule = FreezeRule.STALLED_SWEEP


@njit(cache=True)
def next_pair(i, j, n):
    """Successor of (i, j) in the cyclic lexicographic order of pairs i < j"""
    j += 1
    if j == n:
        i += 1
        if i == n - 1:
            i = 0
        j = i + 1
    return i, j


@njit(cache=True)
def metropolis(delta, t, u):
    """Acceptance test against one uniform draw u"""
    if delta < 0:
        return True
    if delta == 0:
        return u < 0.5
    if t <= 0.0:
        return False
    return math.exp(-delta / t) > u


@njit(cache=True)
def cool(t, t_found, frozen, beta, rule, new_best, stalled):
    """One temperature update; returns (t, t_found, frozen)"""
    if frozen:
        return t, t_found, frozen
    if new_best:
        t_found = t
        if rule == 1:
            return t, t_found, True
    if stalled and rule == 0:
        return t_found, t_found, True
    return t / (1.0 + beta * t), t_found, False


@njit(cache=True)
def anneal_kernel(f, d, perm, best_perm, uniforms, current, best, i, j, failures,
                  t, t_found, frozen, beta, rule, threshold):
    """
    Run one trial per entry of uniforms, or stop right after a new best at or
    below threshold. Returns the number of trials done and the loop state.
    """
    n = perm.shape[0]
    n_pairs = n * (n - 1) // 2
    done = 0
    for k in range(uniforms.shape[0]):
        delta = swap_delta_kernel(f, d, perm, i, j)
        new_best = False
        if metropolis(delta, t, uniforms[k]):
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            current += delta
            failures = 0
            if current < best:
                best = current
                best_perm[:] = perm
                new_best = True
        else:
            failures += 1
        t, t_found, frozen = cool(t, t_found, frozen, beta, rule, new_best, failures >= n_pairs)
        i, j = next_pair(i, j, n)
        done = k + 1
        if new_best and best <= threshold:
            break
    return done, current, best, i, j, failures, t, t_found, frozen


def iter_pairs(n: int, count: Optional[int] = None) -> Iterator[Tuple[int, int]]:
    """
    The pair sequence the annealer trials, starting at (0, 1).

    One lexicographic sweep of the pairs i < j by default; with count, that
    many steps of the cycle, wrapping after (n-2, n-1).
    """
    if n < 2:
        return
    steps = n * (n - 1) // 2 if count is None else count
    i, j = 0, 1
    for _ in range(steps):
        yield i, j
        i, j = next_pair(i, j, n)


def init_cooling(
    instance: Instance,
    perm: Sequence[int],
    iterations: int,
    freeze_rule: FreezeRule = FreezeRule.STALLED_SWEEP,
) -> CoolingState:
    """
    Build the schedule from the deltas of every swap at perm.

    t0 = δmin + (δmax - δmin) / 10, tf = δmin and β = (t0 - tf) / (M · t0 · tf),
    where δmin/δmax are the smallest/largest positive deltas and M the trial
    budget. With no positive delta the schedule is flat at T = 1.
    """
    p = as_perm(instance, perm)
    deltas = build_delta_table(instance, p).delta[np.triu_indices(instance.n, k=1)]
    positive = deltas[deltas > 0]

    if positive.size == 0:
        return CoolingState(t=1.0, beta=0.0, t0=1.0, tf=1.0, t_found=1.0, freeze_rule=freeze_rule)

    d_min, d_max = int(positive.min()), int(positive.max())
    t0 = d_min + (d_max - d_min) / 10.0
    tf = float(d_min)
    beta = (t0 - tf) / (iterations * t0 * tf) if iterations > 0 else 0.0
    return CoolingState(t=t0, beta=beta, t0=t0, tf=tf, t_found=t0, freeze_rule=freeze_rule)


def cool_step(state: CoolingState, new_best: bool = False, stalled: bool = False) -> CoolingState:
    """Advance the temperature after one trial"""
    state.t, state.t_found, state.frozen = cool(
        state.t, state.t_found, state.frozen, state.beta, _RULE_CODES[state.freeze_rule], new_best, stalled
    )
    return state


def accept(delta: int, t: float, rng: np.random.Generator) -> bool:
    """Metropolis test with the half-chance rule for neutral swaps"""
    return bool(metropolis(int(delta), float(t), float(rng.random())))


def run_sa(
    instance: Instance,
    config: SAConfig,
    quality_targets: Sequence[float] = (),
    truncate_at_hit: bool = False,
) -> RunRecord:
    """
    One annealing run of config.iterations swap trials.

    The run clock covers the trial loop only; the start permutation and the
    cooling scan come before it.

    Raises:
        MissingBestKnownError: targets given for an instance without C_best
    """
    tracker = HitTracker(instance, quality_targets)
    rng = np.random.default_rng(config.seed)
    n = instance.n
    f, d = instance.flow, instance.dist

    perm = rng.permutation(n).astype(np.int64)
    current = cost(instance, perm)
    best_cost, best_perm = current, perm.copy()
    cooling = init_cooling(instance, perm, config.iterations, config.freeze_rule)
    rule = _RULE_CODES[cooling.freeze_rule]
    i, j, failures = 0, 1, 0

    def stop() -> bool:
        return truncate_at_hit and bool(tracker.targets) and tracker.done

    if n >= 2:
        # compile or load the kernel outside the clock
        anneal_kernel(f, d, perm, best_perm, np.empty(0), current, best_cost, i, j, failures,
                      cooling.t, cooling.t_found, cooling.frozen, cooling.beta, rule, _NO_THRESHOLD)

    start_ns = tracker.start()
    tracker.observe(best_cost, 0)
    trials = 0

    if n < 2:
        trials = config.iterations
    while n >= 2 and trials < config.iterations and not stop():
        uniforms = rng.random(min(TRIAL_CHUNK, config.iterations - trials))
        pos = 0
        while pos < uniforms.size and not stop():
            threshold = tracker.next_threshold
            threshold = _NO_THRESHOLD if threshold is None else threshold
            done, current, best_cost, i, j, failures, t, t_found, frozen = anneal_kernel(
                f, d, perm, best_perm, uniforms[pos:], current, best_cost, i, j, failures,
                cooling.t, cooling.t_found, cooling.frozen, cooling.beta, rule, threshold,
            )
            cooling.t, cooling.t_found, cooling.frozen = t, t_found, frozen
            pos += done
            trials += done
            tracker.observe(best_cost, trials)

    total_ns = time.perf_counter_ns() - start_ns
    best_cost = int(best_cost)
    logger.debug(
        f"SA {instance.name} seed={config.seed}: best {best_cost} after {trials} trials "
        f"(T={cooling.t:.4g}, frozen={cooling.frozen}) in {total_ns / 1e9:.3f}s"
    )
    return RunRecord(
        heuristic=Heuristic.SA,
        instance_name=instance.name,
        seed=config.seed,
        iterations=config.iterations,
        iterations_run=trials,
        total_time_ns=total_ns,
        final_best_cost=best_cost,
        targets=tracker.targets,
        first_hits=dict(tracker.first_hits),
        best_perm=tuple(int(v) for v in best_perm),
    )
