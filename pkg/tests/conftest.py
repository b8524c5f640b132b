import os
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import pytest

from harness.metrics import iteration_sweep
from heuristics.records import FirstHit, Heuristic, RunRecord
from qap.errors import InstanceNotFoundError
from qap.instance import Instance, find_instance

QAPLIB_DIR = os.getenv("QAPLIB_DIR")

needs_qaplib = pytest.mark.skipif(
    not QAPLIB_DIR or not Path(QAPLIB_DIR).is_dir(),
    reason="QAPLIB_DIR is not set to a directory of QAPLIB files",
)


def make_instance(
    n: int,
    seed: int = 0,
    symmetric: bool = False,
    zero_diagonal: bool = False,
    best_known: Optional[int] = None,
    name: Optional[str] = None,
) -> Instance:
    """Seeded random instance; asymmetric with nonzero diagonals unless told otherwise"""
    rng = np.random.default_rng(seed)
    flow = rng.integers(0, 10, size=(n, n))
    dist = rng.integers(0, 10, size=(n, n))
    if symmetric:
        flow = np.triu(flow) + np.triu(flow, 1).T
        dist = np.triu(dist) + np.triu(dist, 1).T
    if zero_diagonal:
        np.fill_diagonal(flow, 0)
        np.fill_diagonal(dist, 0)
    return Instance(name=name or f"rand{n}s{seed}", n=n, flow=flow, dist=dist, best_known=best_known)


def make_record(
    seed: int,
    seconds: float,
    hits: Iterable[float] = (),
    targets: Iterable[float] = (0.0, 0.01),
    heuristic: Heuristic = Heuristic.TS,
    instance_name: str = "fixture",
    iterations: int = 1000,
) -> RunRecord:
    """Hand-built run with a fixed loop time and the given quality hits"""
    return RunRecord(
        heuristic=heuristic,
        instance_name=instance_name,
        seed=seed,
        iterations=iterations,
        total_time_ns=int(seconds * 1e9),
        final_best_cost=100,
        targets=tuple(sorted(targets)),
        first_hits={q: FirstHit(iteration=1, elapsed_ns=1) for q in hits},
        best_perm=(0,),
    )


@pytest.fixture
def pair_instance() -> Instance:
    """N=2, F=[[0,1],[1,0]], D=[[0,3],[3,0]]"""
    return Instance(name="pair", n=2, flow=[[0, 1], [1, 0]], dist=[[0, 3], [3, 0]])


@pytest.fixture
def single_instance() -> Instance:
    return Instance(name="single", n=1, flow=[[0]], dist=[[0]])


def qaplib_instance(name: str) -> Instance:
    """Instance from QAPLIB_DIR; skips the calling test when the file is missing"""
    try:
        return find_instance(name, QAPLIB_DIR)
    except InstanceNotFoundError:
        pytest.skip(f"{name}.dat not in QAPLIB_DIR")


@pytest.fixture
def nug30() -> Instance:
    return qaplib_instance("nug30")


NUG30_TARGETS = [0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05]
NUG30_GRIDS = {
    Heuristic.TS: [10**3, 3 * 10**3, 10**4, 3 * 10**4, 10**5],
    Heuristic.SA: [10**5, 3 * 10**5, 10**6, 3 * 10**6, 10**7],
}


@pytest.fixture(scope="session")
def nug30_sweeps():
    """TS and SA iteration sweeps on nug30, shared by the desk-scale curve tests"""
    instance = qaplib_instance("nug30")
    return {
        heuristic: iteration_sweep(
            heuristic, instance, grid, n_runs=30, base_seed=0, targets=NUG30_TARGETS, workers=None, truncate_at_hit=True
        )
        for heuristic, grid in NUG30_GRIDS.items()
    }
