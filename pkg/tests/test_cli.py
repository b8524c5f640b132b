import pytest

from harness.metrics import CurvePoint, QualityCurve
from harness.tables import read_table, write_curve_table
from heuristics.records import Heuristic
from main import EXIT_CONTRACT, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from qap.instance import load_instance, serialize_instance
from qap.solution import read_solution
from tests.conftest import make_instance


@pytest.fixture
def qaplib(tmp_path):
    directory = tmp_path / "qaplib"
    directory.mkdir()
    (directory / "pair.dat").write_text("2\n0 1\n1 0\n\n0 3\n3 0\n")
    (directory / "tiny.dat").write_text("1\n\n0\n\n0\n")
    (directory / "small6.dat").write_text(serialize_instance(make_instance(6, seed=4)))
    return directory


def _write_curve(path, heuristic, values, instance_name="nug30"):
    points = {q: CurvePoint(t_bar=t, i_opt=1000, n_success=1, n_runs=2) for q, t in values.items()}
    curve = QualityCurve(heuristic=heuristic, instance_name=instance_name, points=points, best_known=6124)
    return write_curve_table(curve, path, seed=0)


def test_oracle(qaplib, capsys):
    assert main(["--qaplib-dir", str(qaplib), "oracle", "--instance", "pair"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "cost 6" in out
    assert "optima 2" in out


def test_solve_single_facility(qaplib, tmp_path, capsys):
    out_dir = tmp_path / "sol"
    code = main([
        "--qaplib-dir", str(qaplib),
        "solve", "--instance", "tiny", "--heuristic", "ts", "--iterations", "3", "--out", str(out_dir),
    ])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# qapbench ")
    assert "seed=0" in out
    assert "cost 0" in out
    assert "quality" not in out  # no best-known cost for 'tiny'
    assert (out_dir / "tiny_ts.sln").read_text() == "1 0\n1\n"


def test_solve_writes_valid_solution(qaplib, tmp_path, capsys):
    out_dir = tmp_path / "sol"
    code = main([
        "--qaplib-dir", str(qaplib),
        "solve", "--instance", "small6", "--heuristic", "sa", "--iterations", "1e3", "--seed", "5",
        "--out", str(out_dir),
    ])
    assert code == EXIT_OK
    instance = load_instance(qaplib / "small6.dat")
    assignment = read_solution((out_dir / "small6_sa.sln").read_text(), instance)
    assert f"cost {assignment.cost}" in capsys.readouterr().out


def test_unknown_instance_is_io_error(qaplib):
    assert main(["--qaplib-dir", str(qaplib), "oracle", "--instance", "missing"]) == EXIT_IO


def test_targets_without_best_known_is_contract_error(qaplib, tmp_path):
    code = main([
        "--qaplib-dir", str(qaplib),
        "solve", "--instance", "pair", "--heuristic", "ts", "--iterations", "3", "--targets", "0.01",
        "--out", str(tmp_path),
    ])
    assert code == EXIT_CONTRACT


def test_empty_grid_is_usage_error(qaplib, tmp_path):
    code = main([
        "--qaplib-dir", str(qaplib),
        "sweep", "--instance", "pair", "--grid", "", "--out", str(tmp_path),
    ])
    assert code == EXIT_USAGE


def test_bad_flag_is_usage_error():
    assert main(["solve", "--heuristic", "ga"]) == EXIT_USAGE


def test_sweep_then_curve(qaplib, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr("qap.instance.BEST_KNOWN", {"small6": 1})
    out_dir = tmp_path / "out"
    code = main([
        "--qaplib-dir", str(qaplib),
        "sweep", "--instance", "small6",
        "--grid", "ts:5,10", "--grid", "sa:50,100",
        "--runs", "2", "--seed", "3", "--targets", "1000", "--workers", "1",
        "--out", str(out_dir),
    ])
    assert code == EXIT_OK
    assert (out_dir / "small6_ts_curve.csv").is_file()
    assert (out_dir / "runs" / "small6" / "sa_I100.jsonl").is_file()

    rebuilt = tmp_path / "rebuilt"
    code = main(["curve", "--logs", str(out_dir / "runs"), "--out", str(rebuilt)])
    assert code == EXIT_OK
    assert (
        read_table(rebuilt / "small6_sa_curve.csv").equals(read_table(out_dir / "small6_sa_curve.csv"))
    )


def test_curve_missing_log_dir(tmp_path):
    assert main(["curve", "--logs", str(tmp_path / "none"), "--out", str(tmp_path)]) == EXIT_IO


def test_crossover_command(tmp_path, capsys):
    sa = _write_curve(tmp_path / "sa.csv", Heuristic.SA, {0.01: 1.0, 0.02: 3.0})
    ts = _write_curve(tmp_path / "ts.csv", Heuristic.TS, {0.01: 2.0, 0.02: 2.0})
    table = tmp_path / "crossover.csv"
    assert main(["crossover", "--sa", str(sa), "--ts", str(ts), "--out", str(table)]) == EXIT_OK
    assert "(0.01, 0.02)" in capsys.readouterr().out
    df = read_table(table)
    assert (df.loc[0, "q_lo"], df.loc[0, "q_hi"]) == (0.01, 0.02)
    assert df.loc[0, "c_best"] == 6124


def test_crossover_mismatched_instances(tmp_path):
    sa = _write_curve(tmp_path / "sa.csv", Heuristic.SA, {0.01: 1.0, 0.02: 3.0}, instance_name="nug30")
    ts = _write_curve(tmp_path / "ts.csv", Heuristic.TS, {0.01: 2.0, 0.02: 2.0}, instance_name="tho150")
    assert main(["crossover", "--sa", str(sa), "--ts", str(ts), "--out", str(tmp_path / "x.csv")]) == EXIT_CONTRACT


def test_crossover_swapped_files_is_usage_error(tmp_path):
    sa = _write_curve(tmp_path / "sa.csv", Heuristic.SA, {0.01: 1.0, 0.02: 3.0})
    ts = _write_curve(tmp_path / "ts.csv", Heuristic.TS, {0.01: 2.0, 0.02: 2.0})
    assert main(["crossover", "--sa", str(ts), "--ts", str(sa), "--out", str(tmp_path / "x.csv")]) == EXIT_USAGE


def test_hardness_command(tmp_path):
    a = _write_curve(tmp_path / "a.csv", Heuristic.SA, {0.0: 4.0, 0.01: 1.0}, instance_name="nug30")
    b = _write_curve(tmp_path / "b.csv", Heuristic.SA, {0.01: 8.0}, instance_name="tai100a")
    table = tmp_path / "hardness.csv"
    assert main(["hardness", str(a), str(b), "--out", str(table)]) == EXIT_OK
    df = read_table(table)
    assert list(df.columns) == ["Q", "nug30:sa", "tai100a:sa"]
    assert main(["hardness", str(a), str(a), "--out", str(table)]) == EXIT_CONTRACT
