# coding: utf-8
import csv

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from pydybm.cli.dybm_cli import main, run_path
from pydybm.cli.dybm_snapshot import load_snapshot
from pydybm.experiment.dybm_experiment import NoisySineSpec, noisy_sine_series, run_stream
from pydybm.utils.constants import STEP_COLUMNS, SUMMARY_COLUMNS, ExitCode

pytestmark = pytest.mark.usefixtures("clean_environment")


def read_rows(path):
    with open(str(path), newline="") as f:
        return list(csv.reader(f))


def numeric_columns(path):
    rows = read_rows(path)[1:]
    return np.array([[float(value) for value in row[1:4]] for row in rows])


def test_train_var_writes_one_row_per_step(tmp_path):
    out = tmp_path / "run.csv"
    code = main(
        ["train", "--model", "var", "--d", "1", "--steps", "1000", "--runs", "1"]
        + ["--seed", "7", "--threads", "1", "--out", str(out)]
    )
    assert code == ExitCode.OK
    rows = read_rows(out)
    assert rows[0] == STEP_COLUMNS
    assert len(rows) == 1001
    assert rows[1][0] == "1"
    assert rows[1][4] == ""
    assert rows[51][4] != ""
    assert rows[-1][0] == "1000"
    summary = read_rows(tmp_path / "run.summary.csv")
    assert summary[0] == SUMMARY_COLUMNS
    assert summary[1][:5] == ["var", "1", "0", "1", "1000"]
    assert summary[1][6] == "0"
    assert float(summary[1][7]) > 0


def test_missing_delay_is_a_usage_error(tmp_path, capsys):
    code = main(["train", "--steps", "200", "--runs", "1", "--out", str(tmp_path / "x.csv")])
    assert code == ExitCode.CONFIG
    assert "usage" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_unknown_config_key_is_a_config_error(tmp_path):
    config = tmp_path / "config.yml"
    config.write_text("experiment:\n  delay: 2\n")
    assert main(["train", "--config", str(config), "--d", "1"]) == ExitCode.CONFIG


def test_delay_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DYBM_D", "2")
    out = tmp_path / "env.csv"
    code = main(["train", "--steps", "200", "--runs", "1", "--threads", "1", "--out", str(out)])
    assert code == ExitCode.OK
    assert read_rows(tmp_path / "env.summary.csv")[1][1] == "2"


def test_reruns_are_byte_identical_across_threads(tmp_path):
    outputs = []
    for threads in ("1", "8"):
        out = tmp_path / ("t" + threads) / "run.csv"
        out.parent.mkdir()
        code = main(
            ["train", "--d", "2", "--mu", "0.5", "--steps", "400", "--runs", "4", "--seed", "3"]
            + ["--threads", threads, "--out", str(out), "--omit-timing"]
        )
        assert code == ExitCode.OK
        outputs.append(out)
    first, second = outputs
    for run in range(4):
        assert open(run_path(str(first), run), "rb").read() == open(run_path(str(second), run), "rb").read()
    summary = [(path.parent / "run.summary.csv").read_bytes() for path in outputs]
    assert summary[0] == summary[1]
    assert read_rows(first.parent / "run.summary.csv")[1][7] == ""


def test_run_path_naming():
    assert run_path("out/run.csv", 0) == "out/run.csv"
    assert run_path("out/run.csv", 3) == "out/run.run3.csv"


def test_sweep_writes_curves_timing_and_summary(tmp_path):
    directory = tmp_path / "sweep"
    code = main(
        ["sweep", "--mus", "0.5,0.9", "--ds", "1,2", "--steps", "300", "--runs", "2"]
        + ["--threads", "2", "--out-dir", str(directory)]
    )
    assert code == ExitCode.OK
    for name in ("curve_mu0_d1.csv", "curve_mu0.5_d1.csv", "curve_mu0.9_d2.csv", "timing.csv"):
        assert (directory / name).exists()
    curve = read_rows(directory / "curve_mu0.5_d1.csv")
    assert curve[0] == ["step", "avg_rolling_mse"]
    assert len(curve) == 202
    assert curve[1][0] == "51"
    summary = read_rows(directory / "summary.csv")[1:]
    assert [(row[0], row[1], row[2]) for row in summary] == [
        ("var", "1", "0"),
        ("gaussian-dybm", "1", "0.5"),
        ("gaussian-dybm", "1", "0.90000000000000002"),
        ("var", "2", "0"),
        ("gaussian-dybm", "2", "0.5"),
        ("gaussian-dybm", "2", "0.90000000000000002"),
    ]
    var_mse = float(summary[0][5])
    dybm_mse = float(summary[1][5])
    assert float(summary[1][6]) == pytest.approx(1.0 - dybm_mse / var_mse)
    assert len(read_rows(directory / "timing.csv")) == 5


def test_divergence_exits_with_numeric_code(tmp_path):
    data = tmp_path / "data.csv"
    values = ["1.0"] * 200
    values[9] = "inf"
    data.write_text("x\n" + "\n".join(values) + "\n")
    code = main(["train", "--d", "1", "--data", str(data), "--out", str(tmp_path / "o.csv")])
    assert code == ExitCode.NUMERIC


def test_train_on_csv_data(tmp_path):
    data = tmp_path / "data.csv"
    series = np.sin(np.arange(300.0) / 10.0)
    data.write_text("a,b\n" + "\n".join("{},{}".format(x, -x) for x in series) + "\n")
    out = tmp_path / "o.csv"
    assert main(["train", "--d", "2", "--data", str(data), "--out", str(out)]) == ExitCode.OK
    rows = read_rows(out)
    assert len(rows) == 301
    assert len(rows[1][1].split(" ")) == 2


def test_snapshot_resume_matches_uninterrupted_training(tmp_path):
    common = ["--d", "2", "--mu", "0.7", "--seed", "5", "--threads", "1"]
    snapshot = str(tmp_path / "model.yml")
    assert main(["snapshot", "save", snapshot, "--steps", "500"] + common) == ExitCode.OK
    resumed = tmp_path / "resumed.csv"
    code = main(["snapshot", "load", snapshot, "--steps", "100", "--out", str(resumed)])
    assert code == ExitCode.OK
    full = tmp_path / "full.csv"
    code = main(["train", "--steps", "600", "--runs", "1", "--out", str(full)] + common)
    assert code == ExitCode.OK
    resumed_rows = read_rows(resumed)[1:]
    assert resumed_rows[0][0] == "501"
    assert_array_equal(numeric_columns(resumed), numeric_columns(full)[500:])


def test_frozen_resume_does_not_learn(tmp_path):
    snapshot = str(tmp_path / "model.yml")
    assert main(["snapshot", "save", snapshot, "--d", "1", "--steps", "300"]) == ExitCode.OK
    out = tmp_path / "frozen.csv"
    code = main(["snapshot", "load", snapshot, "--steps", "150", "--freeze", "--out", str(out)])
    assert code == ExitCode.OK
    model, _, source = load_snapshot(snapshot)
    spec = NoisySineSpec(source["period"], source["amplitude"], source["noise_std"], source["seed"])
    series = noisy_sine_series(spec, 450)[300:]
    record = run_stream(model, series, learn=False)
    assert_array_equal(numeric_columns(out)[:, 1], record.predictions[:, 0])


def test_empty_snapshot_exits_with_snapshot_code(tmp_path):
    path = tmp_path / "empty.yml"
    path.write_text("")
    assert main(["snapshot", "load", str(path)]) == ExitCode.SNAPSHOT


def test_resuming_an_exhausted_csv_is_a_snapshot_error(tmp_path, caplog):
    data = tmp_path / "data.csv"
    data.write_text("x\n" + "\n".join(str(x) for x in np.sin(np.arange(300.0) / 10.0)) + "\n")
    snapshot = str(tmp_path / "model.yml")
    assert main(["snapshot", "save", snapshot, "--d", "1", "--data", str(data)]) == ExitCode.OK
    out = tmp_path / "resumed.csv"
    assert main(["snapshot", "load", snapshot, "--out", str(out)]) == ExitCode.SNAPSHOT
    assert "No data left to resume on after step 300" in caplog.text
    assert not out.exists()


def test_other_snapshot_version_is_reported(tmp_path, caplog):
    snapshot = tmp_path / "model.yml"
    assert main(["snapshot", "save", str(snapshot), "--d", "1", "--steps", "200"]) == ExitCode.OK
    text = snapshot.read_text().replace("format_version: 1", "format_version: 2")
    snapshot.write_text(text)
    assert main(["snapshot", "load", str(snapshot)]) == ExitCode.SNAPSHOT
    assert "Unsupported snapshot format version 2 (expected 1)" in caplog.text


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert "pydybm" in capsys.readouterr().out
