"""qapbench command line

    solve      run one heuristic once and write the .sln
    sweep      multi-start runs over an iteration grid, surface and curve tables
    curve      rebuild curve tables from run logs
    crossover  locate the quality where annealing overtakes tabu search
    hardness   merge curves of several instances into one table
    oracle     exhaustive optimum of a small instance
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from pydantic import ValidationError

# Load environment variables from .env file
load_dotenv()

from harness.crossover import crossover
from harness.experiment import (
    ExperimentSpec,
    curve_table_path,
    curves_from_log_dir,
    run_sweep,
    surface_table_path,
)
from harness.multistart import RunSet, default_workers, run_heuristic
from harness.tables import (
    crossover_frame,
    format_header,
    hardness_frame,
    read_curve_table,
    write_curve_table,
    write_surface_table,
    write_table,
)
from heuristics.records import Heuristic
from qap import __version__
from qap.errors import InstanceNotFoundError, QAPError
from qap.instance import find_instance, quality
from qap.oracle import DEFAULT_MAX_N, brute_force
from qap.solution import Assignment, write_solution

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONTRACT = 4


class UsageError(QAPError):
    """Arguments that parse but make no sense together"""


def _targets(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad quality target list {text!r}") from e
    if any(q < 0 for q in values):
        raise argparse.ArgumentTypeError("quality targets must be >= 0")
    return values


def _budget(text: str) -> int:
    """Iteration budget; accepts 100000, 1e5 or 10^5"""
    text = text.strip()
    try:
        if "^" in text:
            base, exp = text.split("^")
            value = int(base) ** int(exp)
        elif "e" in text.lower():
            value = int(float(text))
        else:
            value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad iteration budget {text!r}") from e
    if value < 0:
        raise argparse.ArgumentTypeError("iteration budgets must be >= 0")
    return value


def _grid(text: str) -> Tuple[Optional[Heuristic], List[int]]:
    """'1000,5000' for every heuristic, or 'ts:1000,5000' for one"""
    heuristic = None
    if ":" in text:
        prefix, text = text.split(":", 1)
        try:
            heuristic = Heuristic(prefix.strip().lower())
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"unknown heuristic {prefix!r} in grid") from e
    budgets = [_budget(part) for part in text.split(",") if part.strip()]
    if not budgets:
        raise argparse.ArgumentTypeError("iteration grid must not be empty")
    return heuristic, budgets


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qapbench", description="QAP tabu search vs annealing benchmark")
    parser.add_argument("--version", action="version", version=f"qapbench {__version__}")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=os.getenv("QAP_LOG_LEVEL", "INFO").upper(),
        help="Root logging level (default: $QAP_LOG_LEVEL or INFO)",
    )
    parser.add_argument("--qaplib-dir", default=None, help="Directory of QAPLIB files (default: $QAPLIB_DIR)")
    sub = parser.add_subparsers(dest="command", required=True)

    heuristic_choices = [h.value for h in Heuristic]

    solve = sub.add_parser("solve", help="Run one heuristic once")
    solve.add_argument("--instance", required=True, help="Instance name or .dat path")
    solve.add_argument("--heuristic", choices=heuristic_choices, required=True)
    solve.add_argument("--iterations", type=_budget, required=True)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--targets", type=_targets, default=[])
    solve.add_argument("--truncate-at-hit", action="store_true")
    solve.add_argument("--out", type=Path, default=Path("."), help="Directory for the .sln file")

    sweep = sub.add_parser("sweep", help="Multi-start runs over an iteration grid")
    sweep.add_argument("--instance", nargs="+", required=True)
    sweep.add_argument("--heuristic", choices=heuristic_choices, action="append", default=None)
    sweep.add_argument("--grid", "--iterations", type=_grid, action="append", default=None, dest="grid")
    sweep.add_argument("--runs", type=int, default=10)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--targets", type=_targets, default=None)
    sweep.add_argument("--out", type=Path, default=Path("results"))
    sweep.add_argument("--workers", type=int, default=None, help="Process cap (default: $QAP_WORKERS or CPU count)")
    sweep.add_argument("--truncate-at-hit", action="store_true")
    sweep.add_argument("--archive", metavar="LABEL", default=None, help="Also store runs and logs in the archive")

    curve = sub.add_parser("curve", help="Curve tables from run logs")
    curve.add_argument("--logs", type=Path, default=None, help="Run-log directory (default: <out>/runs)")
    curve.add_argument("--targets", type=_targets, default=None)
    curve.add_argument("--out", type=Path, default=Path("results"))

    cross = sub.add_parser("crossover", help="Locate Q* from SA and TS curve tables")
    cross.add_argument("--sa", type=Path, action="append", required=True, help="SA curve table (repeatable)")
    cross.add_argument("--ts", type=Path, action="append", required=True, help="TS curve table, paired with --sa")
    cross.add_argument("--out", type=Path, default=Path("results/crossover.csv"))

    hard = sub.add_parser("hardness", help="Merge curve tables of several instances")
    hard.add_argument("curves", type=Path, nargs="+")
    hard.add_argument("--out", type=Path, default=Path("results/hardness.csv"))

    oracle = sub.add_parser("oracle", help="Exhaustive optimum of a small instance")
    oracle.add_argument("--instance", required=True)
    oracle.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)

    return parser


def cmd_solve(args) -> int:
    instance = find_instance(args.instance, args.qaplib_dir)
    heuristic = Heuristic(args.heuristic)
    record = run_heuristic(heuristic, instance, args.iterations, args.seed, args.targets, args.truncate_at_hit)

    assignment = Assignment.from_perm(instance, record.best_perm)
    args.out.mkdir(parents=True, exist_ok=True)
    sln_path = args.out / f"{instance.name}_{heuristic.value}.sln"
    sln_path.write_text(write_solution(instance, assignment), encoding="utf-8")

    print(format_header(seed=args.seed, instance=instance.name, heuristic=heuristic.value, iterations=args.iterations), end="")
    print(f"cost {record.final_best_cost}")
    if instance.best_known is not None:
        print(f"quality {quality(record.final_best_cost, instance.best_known):.6g}")
    print(f"time_seconds {record.total_time:.6f}")
    print(f"iterations_run {record.iterations_run}")
    for q in record.targets:
        hit = record.first_hits.get(q)
        print(f"hit Q={q} " + (f"iteration={hit.iteration}" if hit else "not reached"))
    print(f"solution {sln_path}")
    return EXIT_OK


def _experiment_spec(args) -> ExperimentSpec:
    heuristics = [Heuristic(h) for h in (args.heuristic or [h.value for h in Heuristic])]
    grids: Dict[Heuristic, List[int]] = {}
    for heuristic, budgets in args.grid or []:
        for h in [heuristic] if heuristic else heuristics:
            grids[h] = budgets
    fields = dict(
        heuristics=heuristics,
        grids=grids,
        n_runs=args.runs,
        base_seed=args.seed,
        out_dir=args.out,
        workers=args.workers or default_workers(),
        truncate_at_hit=args.truncate_at_hit,
    )
    if args.targets is not None:
        fields["targets"] = args.targets
    return ExperimentSpec(**fields)


def cmd_sweep(args) -> int:
    spec = _experiment_spec(args)
    instances = [find_instance(name, args.qaplib_dir) for name in args.instance]

    on_runset = None
    archive_handler = None
    if args.archive:
        from db import archive_runset, get_database_url, get_engine, init_archive, setup_archive_logging

        engine = get_engine(*get_database_url(spec.out_dir))
        init_archive(engine)
        archive_handler = setup_archive_logging(engine, experiment=args.archive)

        def on_runset(runset: RunSet):
            try:
                archive_runset(runset, args.archive, engine)
            except Exception as e:
                logger.warning(f"Failed to archive {runset.instance_name} I={runset.iterations}: {e}")

    try:
        for instance in instances:
            results = run_sweep(spec, instance, on_runset=on_runset)
            for heuristic, result in results.items():
                print(f"{instance.name} {heuristic.value}: {len(result.curve.points)} qualities reached")
                print(f"  surface {surface_table_path(spec.out_dir, instance.name, heuristic)}")
                print(f"  curve   {curve_table_path(spec.out_dir, instance.name, heuristic)}")
    finally:
        if archive_handler is not None:
            archive_handler.stop()
            logging.getLogger().removeHandler(archive_handler)
    return EXIT_OK


def cmd_curve(args) -> int:
    log_dir = args.logs or args.out / "runs"
    if not log_dir.is_dir():
        raise FileNotFoundError(f"Run-log directory {log_dir} does not exist")
    for result in curves_from_log_dir(log_dir, args.targets):
        meta = {"source": log_dir.as_posix()}
        write_surface_table(
            result.surface,
            surface_table_path(args.out, result.instance_name, result.heuristic),
            instance=result.instance_name,
            heuristic=result.heuristic.value,
            **meta,
        )
        path = write_curve_table(result.curve, curve_table_path(args.out, result.instance_name, result.heuristic), **meta)
        print(f"{result.instance_name} {result.heuristic.value}: {path}")
    return EXIT_OK


def cmd_crossover(args) -> int:
    if len(args.sa) != len(args.ts):
        raise UsageError(f"--sa given {len(args.sa)} times but --ts {len(args.ts)} times")

    reports = []
    best = {}
    for sa_path, ts_path in zip(args.sa, args.ts):
        curve_sa, curve_ts = read_curve_table(sa_path), read_curve_table(ts_path)
        if curve_sa.heuristic is not Heuristic.SA or curve_ts.heuristic is not Heuristic.TS:
            raise UsageError(f"{sa_path} must be an SA curve and {ts_path} a TS curve")
        report = crossover(curve_sa, curve_ts)
        reports.append(report)
        best[report.instance_name] = curve_sa.best_known or curve_ts.best_known

        bracket = report.q_star_bracket
        print(
            f"{report.instance_name}: Q* in {bracket if bracket else 'none'}"
            + (f", estimate {report.q_star_estimate:.6g}" if report.q_star_estimate is not None else "")
            + (f" ({report.note})" if report.note else "")
        )

    sources = ",".join(p.as_posix() for p in [*args.sa, *args.ts])
    write_table(crossover_frame(reports, best), args.out, sources=sources)
    print(f"table {args.out}")
    return EXIT_OK


def cmd_hardness(args) -> int:
    curves = [read_curve_table(path) for path in args.curves]
    sources = ",".join(p.as_posix() for p in args.curves)
    write_table(hardness_frame(curves), args.out, sources=sources)
    print(f"table {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    instance = find_instance(args.instance, args.qaplib_dir)
    assignment, count = brute_force(instance, max_n=args.max_n)
    print(f"cost {assignment.cost}")
    print(f"optima {count}")
    print("perm " + " ".join(str(loc + 1) for loc in assignment.perm))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "curve": cmd_curve,
    "crossover": cmd_crossover,
    "hardness": cmd_hardness,
    "oracle": cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    logging.basicConfig(level=args.log_level, format="%(levelname)s [%(name)s] %(message)s")
    logging.getLogger("sqlalchemy").setLevel(logging.WARNING)

    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValidationError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except (InstanceNotFoundError, OSError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_IO
    except (QAPError, ValueError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
