import math

import pytest

from harness.crossover import crossover
from harness.metrics import CurvePoint, QualityCurve
from heuristics.records import Heuristic
from qap.errors import CurveFileError
from tests.conftest import needs_qaplib


def _curve(heuristic, values, instance_name="nug30"):
    points = {q: CurvePoint(t_bar=t, i_opt=1000, n_success=1, n_runs=1) for q, t in values.items()}
    return QualityCurve(heuristic=heuristic, instance_name=instance_name, points=points)


def test_single_crossing():
    sa = _curve(Heuristic.SA, {0.01: 1.0, 0.02: 3.0})
    ts = _curve(Heuristic.TS, {0.01: 2.0, 0.02: 2.0})
    report = crossover(sa, ts)
    assert report.found
    assert report.q_star_bracket == (0.01, 0.02)
    g_lo, g_hi = math.log(0.5), math.log(1.5)
    assert report.q_star_estimate == pytest.approx(0.01 + 0.01 * g_lo / (g_lo - g_hi))
    assert 0.01 < report.q_star_estimate < 0.02
    assert report.dominant_below is Heuristic.SA
    assert report.dominant_above is Heuristic.TS
    assert not report.non_monotone


def test_identical_curves_are_degenerate():
    values = {0.0: 5.0, 0.01: 2.0, 0.02: 1.0}
    report = crossover(_curve(Heuristic.SA, values), _curve(Heuristic.TS, values))
    assert report.degenerate
    assert report.q_star_estimate is None
    assert not report.found


def test_no_crossing_names_dominant():
    sa = _curve(Heuristic.SA, {0.0: 10.0, 0.01: 5.0, 0.02: 4.0})
    ts = _curve(Heuristic.TS, {0.0: 1.0, 0.01: 1.0, 0.02: 1.0})
    report = crossover(sa, ts)
    assert not report.found
    assert report.dominant_below is Heuristic.TS
    assert "no crossover" in report.note


def test_multiple_crossings_flagged():
    sa = _curve(Heuristic.SA, {0.0: 1.0, 0.01: 3.0, 0.02: 1.0})
    ts = _curve(Heuristic.TS, {0.0: 2.0, 0.01: 2.0, 0.02: 2.0})
    report = crossover(sa, ts)
    assert report.non_monotone
    assert report.brackets == [(0.0, 0.01), (0.01, 0.02)]
    assert len(report.estimates) == 2


def test_only_common_qualities_are_compared():
    sa = _curve(Heuristic.SA, {0.0: 9.0, 0.01: 1.0, 0.02: 3.0})
    ts = _curve(Heuristic.TS, {0.01: 2.0, 0.02: 2.0, 0.05: 1.0})
    assert crossover(sa, ts).brackets == [(0.01, 0.02)]


def test_mismatched_instances():
    sa = _curve(Heuristic.SA, {0.01: 1.0, 0.02: 3.0}, instance_name="nug30")
    ts = _curve(Heuristic.TS, {0.01: 2.0, 0.02: 2.0}, instance_name="tai100a")
    with pytest.raises(CurveFileError):
        crossover(sa, ts)


def test_needs_two_common_points():
    sa = _curve(Heuristic.SA, {0.01: 1.0})
    ts = _curve(Heuristic.TS, {0.01: 2.0})
    with pytest.raises(CurveFileError):
        crossover(sa, ts)


@needs_qaplib
@pytest.mark.slow
def test_nug30_tabu_faster_at_loose_quality(nug30_sweeps):
    report = crossover(nug30_sweeps[Heuristic.SA].curve, nug30_sweeps[Heuristic.TS].curve)
    assert report.dominant_above is Heuristic.TS
    assert report.dominant_below is Heuristic.SA
