import json
import logging

import pytest

from harness.multistart import RunSet, multi_start
from harness.runlog import SCHEMA_VERSION, load_runs, persist_runs, read_run_log
from heuristics.records import Heuristic
from qap.errors import RunLogError
from qap.oracle import brute_force
from tests.conftest import make_instance


@pytest.fixture
def runset() -> RunSet:
    instance = make_instance(6, seed=3)
    optimum = brute_force(instance)[0].cost
    instance = make_instance(6, seed=3, best_known=optimum)
    return multi_start(Heuristic.TS, instance, 40, n_runs=3, base_seed=8, targets=[0.1, 0.0])


def _fields(runset):
    return [(r.iteration_fields(), r.total_time_ns, r.first_hits) for r in runset.records]


def test_persist_then_load(tmp_path, runset):
    path = tmp_path / "runs" / "cell.jsonl"
    assert persist_runs(runset, path) == 3
    loaded = load_runs(path)
    assert (loaded.heuristic, loaded.instance_name, loaded.iterations) == (
        runset.heuristic,
        runset.instance_name,
        runset.iterations,
    )
    assert _fields(loaded) == _fields(runset)


def test_header_line(tmp_path, runset):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    header = json.loads(path.read_text().splitlines()[0])
    assert header == {"kind": "header", "schema_name": "qap-runlog", "version": SCHEMA_VERSION}


def test_append_concatenates(tmp_path, runset):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    persist_runs(runset, path, append=True)
    loaded = load_runs(path)
    assert _fields(loaded) == _fields(runset) * 2
    assert sum(1 for line in path.read_text().splitlines() if '"header"' in line) == 1


def test_append_continues_run_numbering(tmp_path, runset):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    persist_runs(runset, path, append=True)
    runs = [json.loads(line)["run"] for line in path.read_text().splitlines()[1:]]
    assert runs == [0, 1, 2, 3, 4, 5]


def test_overwrite(tmp_path, runset):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    persist_runs(runset, path, append=False)
    assert load_runs(path).n_runs == 3


def test_damaged_line_skipped_with_warning(tmp_path, runset, caplog):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    lines = path.read_text().splitlines()
    lines[2] = lines[2].replace('"final_best_cost"', '"final_best_cosX"', 1)
    path.write_text("\n".join(lines) + "\n")

    with caplog.at_level(logging.WARNING, logger="harness.runlog"):
        loaded, skipped = read_run_log(path)
    assert skipped == 1
    assert loaded.n_runs == 2
    assert "damaged" in caplog.text


def test_truncated_tail_then_append(tmp_path, runset):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    text = path.read_text()
    path.write_text(text[: len(text) - 20])  # cut the last record short, no newline

    persist_runs(runset, path, append=True)
    loaded, skipped = read_run_log(path)
    assert skipped == 1
    assert loaded.n_runs == 2 + 3


def test_rejects_missing_header(tmp_path):
    path = tmp_path / "cell.jsonl"
    path.write_text('{"kind": "run"}\n')
    with pytest.raises(RunLogError):
        read_run_log(path)


def test_rejects_other_version(tmp_path, runset):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    lines = path.read_text().splitlines()
    lines[0] = json.dumps({"kind": "header", "schema_name": "qap-runlog", "version": SCHEMA_VERSION + 1})
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(RunLogError):
        read_run_log(path)


def test_rejects_empty_and_runless_files(tmp_path, runset):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(RunLogError):
        read_run_log(empty)

    header_only = tmp_path / "header.jsonl"
    persist_runs(runset, header_only)
    header_only.write_text(header_only.read_text().splitlines()[0] + "\n")
    with pytest.raises(RunLogError):
        read_run_log(header_only)


def test_rejects_mixed_cells(tmp_path, runset):
    path = tmp_path / "cell.jsonl"
    persist_runs(runset, path)
    other = RunSet(heuristic=runset.heuristic, instance_name=runset.instance_name, iterations=99)
    for record in runset.records:
        record.iterations = 99
        other.append(record)
    persist_runs(other, path, append=True)
    with pytest.raises(RunLogError):
        read_run_log(path)
