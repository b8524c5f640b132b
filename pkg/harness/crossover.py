"""Locating the quality Q* where annealing overtakes tabu search"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from harness.metrics import QualityCurve
from heuristics.records import Heuristic
from qap.errors import CurveFileError

logger = logging.getLogger(__name__)


@dataclass
class CrossoverReport:
    """
    Sign changes of T̄_SA - T̄_TS along the common Q grid.

    brackets holds every adjacent (Q_lo, Q_hi) pair where the faster heuristic
    changes; estimates holds the matching log-linear interpolations of Q*.
    """

    instance_name: str
    brackets: List[Tuple[float, float]] = field(default_factory=list)
    estimates: List[float] = field(default_factory=list)
    dominant_below: Optional[Heuristic] = None
    dominant_above: Optional[Heuristic] = None
    non_monotone: bool = False
    degenerate: bool = False
    note: str = ""

    @property
    def q_star_bracket(self) -> Optional[Tuple[float, float]]:
        return self.brackets[0] if self.brackets else None

    @property
    def q_star_estimate(self) -> Optional[float]:
        return self.estimates[0] if self.estimates else None

    @property
    def found(self) -> bool:
        return bool(self.brackets)


def _log_gap(t_sa: float, t_ts: float) -> float:
    if t_sa > 0 and t_ts > 0:
        return math.log(t_sa) - math.log(t_ts)
    return t_sa - t_ts


def _faster(gap: float) -> Heuristic:
    return Heuristic.SA if gap < 0 else Heuristic.TS


def crossover(curve_sa: QualityCurve, curve_ts: QualityCurve) -> CrossoverReport:
    """
    Compare two curves of the same instance.

    Raises:
        CurveFileError: different instances, or fewer than two common Q values
    """
    if curve_sa.instance_name != curve_ts.instance_name:
        raise CurveFileError(
            f"Curves belong to different instances: {curve_sa.instance_name} vs {curve_ts.instance_name}"
        )
    common = sorted(set(curve_sa.points) & set(curve_ts.points))
    if len(common) < 2:
        raise CurveFileError(
            f"Need at least two common Q values to compare curves for {curve_sa.instance_name}, got {common}"
        )

    gaps = [(q, _log_gap(curve_sa.points[q].t_bar, curve_ts.points[q].t_bar)) for q in common]
    signed = [(q, g) for q, g in gaps if g != 0]
    report = CrossoverReport(instance_name=curve_sa.instance_name)

    if not signed:
        report.degenerate = True
        report.note = "curves coincide on the sampled grid; no crossover estimate"
        logger.warning(f"Crossover for {report.instance_name}: {report.note}")
        return report

    report.dominant_below = _faster(signed[0][1])
    report.dominant_above = _faster(signed[-1][1])

    for (q_lo, g_lo), (q_hi, g_hi) in zip(signed, signed[1:]):
        if (g_lo < 0) != (g_hi < 0):
            report.brackets.append((q_lo, q_hi))
            report.estimates.append(q_lo + (q_hi - q_lo) * g_lo / (g_lo - g_hi))

    if not report.brackets:
        report.note = f"no crossover in sampled range; {report.dominant_below.value.upper()} faster throughout"
    elif len(report.brackets) > 1:
        report.non_monotone = True
        report.note = f"{len(report.brackets)} sign changes; ordering is not monotone in Q"

    logger.info(
        f"Crossover for {report.instance_name}: brackets={report.brackets}, estimate={report.q_star_estimate}"
        + (f" ({report.note})" if report.note else "")
    )
    return report
