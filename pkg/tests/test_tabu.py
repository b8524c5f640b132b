import math

import numpy as np
import pytest

from harness.multistart import multi_start
from heuristics.records import Heuristic, HitTracker, IterationSemantics
from heuristics.tabu import TabuConfig, init_tabu_state, run_tabu, tabu_step
from qap.errors import MissingBestKnownError
from qap.evaluation import build_delta_table, cost
from qap.oracle import brute_force
from tests.conftest import make_instance, needs_qaplib


@pytest.mark.parametrize("n, bounds", [(30, (27, 33)), (10, (9, 11)), (7, (7, 7)), (2, (2, 2)), (1, (1, 1))])
def test_tenure_bounds(n, bounds):
    assert TabuConfig(iterations=1).tenure_bounds(n) == bounds


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        TabuConfig(iterations=-1)
    with pytest.raises(ValueError):
        TabuConfig(iterations=1, tenure_low_factor=1.2, tenure_high_factor=1.1)


def test_zero_iterations_returns_start():
    instance = make_instance(8, seed=2)
    record = run_tabu(instance, TabuConfig(iterations=0, seed=42))
    start = np.random.default_rng(42).permutation(8)
    assert record.final_best_cost == cost(instance, start)
    assert record.best_perm == tuple(int(v) for v in start)
    assert record.iterations_run == 0
    assert record.first_hits == {}
    assert record.heuristic is Heuristic.TS
    assert record.iteration_semantics is IterationSemantics.NEIGHBORHOOD_SCAN


def test_start_hit_is_iteration_zero():
    instance = make_instance(6, seed=2)
    start_cost = cost(instance, np.random.default_rng(5).permutation(6))
    instance = make_instance(6, seed=2, best_known=start_cost)
    record = run_tabu(instance, TabuConfig(iterations=0, seed=5), quality_targets=[0.0])
    assert record.first_hits[0.0].iteration == 0


def test_targets_need_best_known():
    with pytest.raises(MissingBestKnownError):
        run_tabu(make_instance(5), TabuConfig(iterations=10), quality_targets=[0.01])


def test_single_facility_runs(single_instance):
    record = run_tabu(single_instance, TabuConfig(iterations=5))
    assert record.final_best_cost == 0
    assert record.iterations_run == 5


def test_deterministic_for_seed():
    instance = make_instance(9, seed=4)
    a = run_tabu(instance, TabuConfig(iterations=200, seed=7))
    b = run_tabu(instance, TabuConfig(iterations=200, seed=7))
    assert a.iteration_fields() == b.iteration_fields()


def test_step_keeps_cost_and_table_consistent():
    instance = make_instance(10, seed=6)
    state = init_tabu_state(instance, TabuConfig(iterations=0, seed=1))
    low, high = state.tenure_low, state.tenure_high
    for k in range(1, 151):
        tabu_step(state)
        assert state.iteration == k
        assert state.cost == cost(instance, state.perm)
        assert state.best_cost == cost(instance, state.best_perm)
        assert state.best_cost <= state.cost
        move = state.last_move
        assert move.kind in {"admissible", "aspired", "fallback"}
        assert move.i < move.j
        assert all(low <= t <= high for t in move.tenures)
        if k % 25 == 0:
            assert np.array_equal(state.table.delta, build_delta_table(instance, state.perm).delta)


def test_new_best_taken_even_when_tabu():
    instance = make_instance(7, seed=12)
    rng = np.random.default_rng(0)
    # a start with at least one improving swap
    while True:
        perm = rng.permutation(7)
        if build_delta_table(instance, perm).delta.min() < 0:
            break
    state = init_tabu_state(instance, TabuConfig(iterations=0, seed=0), perm=perm)
    state.tabu.eligible[:] = 10**9  # everything tabu
    best_delta = int(state.table.delta.min())
    before = state.cost

    tabu_step(state)

    assert state.last_move.kind == "aspired"
    assert state.last_move.delta == best_delta
    assert state.cost == before + best_delta
    assert state.improved


def test_fallback_when_nothing_admissible():
    instance = make_instance(6, seed=3)
    start = brute_force(instance)[0].perm  # a global optimum: no swap can give a new best
    state = init_tabu_state(instance, TabuConfig(iterations=0, seed=0), perm=start)
    state.tabu.eligible[:] = 10**9
    state.tabu.last_occupied[:] = 10**9  # no long-term aspiration either
    expected = int(np.min(state.table.delta[state.upper]))

    tabu_step(state)

    assert state.last_move.kind == "fallback"
    assert state.last_move.delta == expected


def test_reversal_stays_tabu_for_lower_tenure():
    instance = make_instance(10, seed=5)
    state = init_tabu_state(instance, TabuConfig(iterations=0, seed=3))
    tabu_step(state)
    i, j = state.last_move.i, state.last_move.j
    low = state.tenure_low
    assert low == math.ceil(0.9 * 10)

    # swapping i and j again puts both back on the locations they just left
    elig = state.tabu.eligible[:, state.perm]
    assert elig[i, j] >= state.iteration + low
    assert elig[j, i] >= state.iteration + low
    for k in range(state.iteration, state.iteration + low):
        assert elig[i, j] > k and elig[j, i] > k


def _long_unused_worse_move(config: TabuConfig):
    """
    State at a global optimum (no new-best aspiration) where the worst swap is
    tabu but aspired through a long-unused placement, and all others are free.
    """
    instance = make_instance(6, seed=3)
    start = brute_force(instance)[0].perm
    state = init_tabu_state(instance, config, perm=start)
    deltas = np.where(state.upper, state.table.delta, np.iinfo(np.int64).min)
    a, b = (int(v) for v in np.unravel_index(np.argmax(deltas), deltas.shape))
    pa, pb = state.perm[a], state.perm[b]
    state.tabu.eligible[a, pb] = state.tabu.eligible[b, pa] = 10**9
    state.tabu.last_occupied[a, pb] = -(10**9)
    return state, (a, b)


def test_aspiration_priority_prefers_aspired_moves():
    state, pair = _long_unused_worse_move(TabuConfig(iterations=0, seed=0, aspiration_priority=True))
    best_free = int(np.min(state.table.delta[state.upper]))
    worse = int(state.table.delta[pair])
    assert worse > best_free

    tabu_step(state)

    assert (state.last_move.i, state.last_move.j) == pair
    assert state.last_move.kind == "aspired"
    assert state.last_move.delta == worse


def test_best_admissible_move_without_priority():
    state, pair = _long_unused_worse_move(TabuConfig(iterations=0, seed=0))
    best_free = int(np.min(state.table.delta[state.upper]))

    tabu_step(state)

    assert (state.last_move.i, state.last_move.j) != pair
    assert state.last_move.kind == "admissible"
    assert state.last_move.delta == best_free


def test_tenure_draws_uniform():
    instance = make_instance(30, seed=1)
    state = init_tabu_state(instance, TabuConfig(iterations=0, seed=2))
    low, high = state.tenure_low, state.tenure_high
    draws = []
    for _ in range(3000):
        tabu_step(state)
        draws.extend(state.last_move.tenures)
    observed = np.bincount(np.array(draws) - low, minlength=high - low + 1)
    assert observed.size == high - low + 1
    expected = len(draws) / observed.size
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    assert chi2 < 22.458  # 6 degrees of freedom, p = 0.001


def test_best_so_far_never_increases():
    instance = make_instance(12, seed=14)
    state = init_tabu_state(instance, TabuConfig(iterations=0, seed=6))
    previous = state.best_cost
    for _ in range(500):
        tabu_step(state)
        assert state.best_cost <= previous
        assert state.best_cost <= state.cost
        assert state.improved == (state.best_cost < previous)
        previous = state.best_cost


def test_first_hits_bracket_the_budget():
    base = make_instance(8, seed=31)
    optimum = brute_force(base)[0].cost
    instance = make_instance(8, seed=31, best_known=optimum)
    targets = [0.0, 0.02, 0.05, 0.1, 0.3]
    full = run_tabu(instance, TabuConfig(iterations=400, seed=4), quality_targets=targets)
    assert full.first_hits
    for q, hit in full.first_hits.items():
        # the trajectory does not depend on the budget, so a hit at h needs exactly h iterations
        at = run_tabu(instance, TabuConfig(iterations=hit.iteration, seed=4), quality_targets=[q])
        assert at.hit(q) and at.first_hits[q].iteration == hit.iteration
        if hit.iteration > 0:
            before = run_tabu(instance, TabuConfig(iterations=hit.iteration - 1, seed=4), quality_targets=[q])
            assert not before.hit(q)



def test_finds_optimum_on_small_instance():
    instance = make_instance(7, seed=23)
    optimum = brute_force(instance)[0].cost
    best = min(run_tabu(instance, TabuConfig(iterations=300, seed=s)).final_best_cost for s in range(20))
    assert best == optimum


def test_truncate_at_hit_stops_early():
    instance = make_instance(7, seed=23)
    optimum = brute_force(instance)[0].cost
    instance = make_instance(7, seed=23, best_known=optimum)
    record = run_tabu(instance, TabuConfig(iterations=5000, seed=1), quality_targets=[0.5], truncate_at_hit=True)
    assert record.hit(0.5)
    assert record.iterations_run < 5000
    assert record.iterations_run == record.first_hits[0.5].iteration


@needs_qaplib
@pytest.mark.slow
def test_nug30_never_beats_best_known(nug30):
    record = run_tabu(nug30, TabuConfig(iterations=10**4, seed=0), quality_targets=[0.05, 0.0])
    assert record.final_best_cost >= 6124
    assert record.hit(0.05)


@needs_qaplib
@pytest.mark.slow
def test_nug30_best_known_attained(nug30):
    runs = multi_start(
        Heuristic.TS, nug30, 10**5, n_runs=200, base_seed=0, targets=[0.0], workers=None, truncate_at_hit=True
    )
    assert any(record.hit(0.0) for record in runs.records)


def test_clock_starts_after_delta_table(monkeypatch):
    events = []
    real_init, real_start = init_tabu_state, HitTracker.start

    def init(*args, **kwargs):
        events.append("init")
        return real_init(*args, **kwargs)

    def start(self):
        events.append("clock")
        return real_start(self)

    monkeypatch.setattr("heuristics.tabu.init_tabu_state", init)
    monkeypatch.setattr(HitTracker, "start", start)
    run_tabu(make_instance(6, seed=2), TabuConfig(iterations=20, seed=1))
    assert events == ["init", "clock"]
