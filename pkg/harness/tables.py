"""Comma-separated tables for plotting tools

Every table starts with '#' comment lines carrying the tool version, the base
seed and the experiment settings, followed by a plain CSV body. Undefined T̄
values are written as the token "undefined", never as a number.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from harness.crossover import CrossoverReport
from harness.metrics import CurvePoint, QualityCurve, Surface
from heuristics.records import Heuristic
from qap import __version__
from qap.errors import CurveFileError

logger = logging.getLogger(__name__)

UNDEFINED = "undefined"
CURVE_COLUMNS = ["Q", "t_bar_seconds", "i_opt", "n_success", "n_runs"]
SURFACE_COLUMNS = ["Q", "I", "t_bar_seconds", "n_success", "n_runs"]


def format_header(**meta) -> str:
    """One '#' line: tool version then key=value pairs in the given order"""
    fields = [f"qapbench {__version__}"] + [f"{key}={value}" for key, value in meta.items()]
    return "# " + " | ".join(fields) + "\n"


def parse_header(path: Union[str, Path]) -> Dict[str, str]:
    """key=value pairs from the leading '#' lines of a table"""
    meta: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            for part in line[1:].split(" | "):
                key, sep, value = part.strip().partition("=")
                if sep:
                    meta[key] = value
    return meta


def write_table(df: pd.DataFrame, path: Union[str, Path], **meta) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_header(**meta))
        df.to_csv(fh, index=False, na_rep=UNDEFINED, lineterminator="\n")
    logger.debug(f"Wrote table {path} ({len(df)} rows)")
    return path


def read_table(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", na_values=[UNDEFINED], keep_default_na=False, float_precision="round_trip")


def curve_frame(curve: QualityCurve) -> pd.DataFrame:
    rows = [
        {
            "Q": q,
            "t_bar_seconds": point.t_bar,
            "i_opt": point.i_opt,
            "n_success": point.n_success,
            "n_runs": point.n_runs,
        }
        for q, point in sorted(curve.points.items())
    ]
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)


def surface_frame(surface: Surface) -> pd.DataFrame:
    rows = [
        {
            "Q": q,
            "I": iterations,
            "t_bar_seconds": cell.t_bar,
            "n_success": cell.n_success,
            "n_runs": cell.n_runs,
        }
        for q, row in sorted(surface.items())
        for iterations, cell in sorted(row.items())
    ]
    return pd.DataFrame(rows, columns=SURFACE_COLUMNS)


def write_curve_table(curve: QualityCurve, path: Union[str, Path], **meta) -> Path:
    return write_table(
        curve_frame(curve),
        path,
        instance=curve.instance_name,
        heuristic=curve.heuristic.value,
        c_best=curve.best_known if curve.best_known is not None else UNDEFINED,
        **meta,
    )


def write_surface_table(surface: Surface, path: Union[str, Path], **meta) -> Path:
    return write_table(surface_frame(surface), path, **meta)


def read_curve_table(path: Union[str, Path]) -> QualityCurve:
    """
    Load a curve table written by write_curve_table.

    Raises:
        CurveFileError: missing instance/heuristic header or missing columns
    """
    meta = parse_header(path)
    if "instance" not in meta or "heuristic" not in meta:
        raise CurveFileError(f"{path}: curve header must name instance and heuristic")
    try:
        heuristic = Heuristic(meta["heuristic"])
    except ValueError as e:
        raise CurveFileError(f"{path}: unknown heuristic {meta['heuristic']!r}") from e

    df = read_table(path)
    missing = set(CURVE_COLUMNS) - set(df.columns)
    if missing:
        raise CurveFileError(f"{path}: missing columns {sorted(missing)}")

    points = {}
    for row in df.itertuples(index=False):
        if pd.isna(row.t_bar_seconds):
            continue
        points[float(row.Q)] = CurvePoint(
            t_bar=float(row.t_bar_seconds),
            i_opt=int(row.i_opt),
            n_success=int(row.n_success),
            n_runs=int(row.n_runs),
        )

    c_best = meta.get("c_best")
    return QualityCurve(
        heuristic=heuristic,
        instance_name=meta["instance"],
        points=points,
        best_known=int(c_best) if c_best and c_best != UNDEFINED else None,
    )


def crossover_frame(reports: Sequence[CrossoverReport], best_known: Optional[Dict[str, int]] = None) -> pd.DataFrame:
    """One row per instance, in the layout of the published Q* table"""
    best_known = best_known or {}
    rows = []
    for report in reports:
        bracket = report.q_star_bracket
        rows.append({
            "instance": report.instance_name,
            "c_best": best_known.get(report.instance_name),
            "q_lo": bracket[0] if bracket else None,
            "q_hi": bracket[1] if bracket else None,
            "q_star": report.q_star_estimate,
            "dominant_below": report.dominant_below.value if report.dominant_below else None,
            "dominant_above": report.dominant_above.value if report.dominant_above else None,
            "n_brackets": len(report.brackets),
            "non_monotone": report.non_monotone,
            "degenerate": report.degenerate,
        })
    return pd.DataFrame(rows)


def hardness_frame(curves: Sequence[QualityCurve]) -> pd.DataFrame:
    """
    T̄(Q) of several curves side by side, one column per instance:heuristic.

    Raises:
        CurveFileError: the same (instance, heuristic) appears twice
    """
    columns: List[str] = []
    series = {}
    for curve in curves:
        label = f"{curve.instance_name}:{curve.heuristic.value}"
        if label in series:
            raise CurveFileError(f"Duplicate curve for {label}")
        columns.append(label)
        series[label] = pd.Series({q: p.t_bar for q, p in curve.points.items()}, dtype="float64")

    df = pd.DataFrame(series, columns=columns)
    df.index.name = "Q"
    return df.sort_index().reset_index()
