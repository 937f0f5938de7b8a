import csv
import io
import json
import math
import subprocess
import sys

import pytest
from click.testing import CliRunner

from exchange_lab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args, **kwargs):
    return runner.invoke(main, list(args), catch_exceptions=False, **kwargs)


# ------------------------------------------------------------------- run


def test_run_half_swap_json(runner):
    result = invoke(runner, "run", "half-swap", "--modes", "4")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["phase_rad"] == pytest.approx(math.pi, abs=1e-12)
    assert payload["visibility"] == 1.0
    assert payload["experiment"] == "half-swap"


def test_run_half_swap_boson_phase_zero(runner):
    result = invoke(runner, "run", "half-swap", "--statistics", "boson")
    payload = json.loads(result.output)
    assert payload["phase_rad"] == 0.0


def test_run_ring_three_wrap_parity(runner):
    result = invoke(runner, "run", "ring", "--n", "3")
    payload = json.loads(result.output)
    assert payload["phase_rad"] == 0.0
    wrap_rows = [row for row in payload["ledgers"][1] if row["wrap"]]
    assert len(wrap_rows) == 1 and wrap_rows[0]["interval_parity"] == 2


def test_run_full_swap_sequential_vs_literal(runner):
    sequential = json.loads(invoke(runner, "run", "full-swap").output)
    literal = json.loads(invoke(runner, "run", "full-swap", "--mode", "literal").output)
    assert sequential["phase_rad"] == pytest.approx(math.pi, abs=1e-12)
    assert literal["phase_rad"] == 0.0
    assert literal["branch_final"] == ["|1010⟩", "|1010⟩"]


def test_run_mixed_statistics_full_swap(runner):
    result = invoke(runner, "run", "full-swap", "--statistics", "mixed:aabb")
    payload = json.loads(result.output)
    assert payload["phase_rad"] == pytest.approx(math.pi, abs=1e-12)


def test_run_ring_revolution_flag(runner):
    result = invoke(runner, "run", "ring", "--n", "2", "--revolution")
    payload = json.loads(result.output)
    assert payload["phase_rad"] == 0.0
    assert payload["params"]["revolution"] is True


def test_run_pulse_defaults_reproduce_half_swap(runner):
    result = invoke(runner, "run", "pulse")
    payload = json.loads(result.output)
    assert payload["phase_rad"] == pytest.approx(math.pi, abs=1e-10)
    assert payload["visibility"] == pytest.approx(1.0, abs=1e-12)


def test_run_pulse_with_theta(runner):
    result = invoke(runner, "run", "pulse", "--theta", str(math.pi / 4))
    payload = json.loads(result.output)
    assert payload["phase_rad"] is None
    assert payload["visibility"] <= 1e-12


def test_run_pulse_schedule_file(runner, tmp_path):
    schedule = {
        "initial": "1010",
        "branch0": [
            {"from": 1, "to": 2, "theta": math.pi / 2},
            {"from": 3, "to": 4, "theta": math.pi / 2},
        ],
        "branch1": [
            {"from": 1, "to": 4, "theta": math.pi / 2},
            {"from": 3, "to": 2, "theta": math.pi / 2},
        ],
    }
    path = tmp_path / "schedule.json"
    path.write_text(json.dumps(schedule))
    result = invoke(runner, "run", "pulse", "--schedule", str(path))
    payload = json.loads(result.output)
    assert payload["phase_rad"] == pytest.approx(math.pi, abs=1e-10)


def test_run_pulse_schedule_rejects_unknown_fields(runner, tmp_path):
    path = tmp_path / "schedule.json"
    path.write_text(json.dumps({"branch0": [], "branch1": [], "noise": 1}))
    result = runner.invoke(main, ["run", "pulse", "--schedule", str(path)])
    assert result.exit_code == 2
    path.write_text(
        json.dumps({"branch0": [{"from": 1, "to": 2, "theta": 0.5, "tag": "x"}], "branch1": []})
    )
    result = runner.invoke(main, ["run", "pulse", "--schedule", str(path)])
    assert result.exit_code == 2


def test_run_shots_require_seed(runner):
    result = runner.invoke(main, ["run", "half-swap", "--shots", "100"])
    assert result.exit_code == 2
    result = invoke(runner, "run", "half-swap", "--shots", "100", "--seed", "42")
    payload = json.loads(result.output)
    assert payload["probabilities"]["shots"] == 100
    assert payload["probabilities"]["x_plus_count"] == 0


def test_run_rejects_bad_configs(runner):
    assert runner.invoke(main, ["run", "half-swap", "--modes", "5"]).exit_code == 2
    assert runner.invoke(main, ["run", "half-swap", "--n", "2"]).exit_code == 2
    assert runner.invoke(main, ["run", "ring"]).exit_code == 2
    assert runner.invoke(main, ["run", "ring", "--n", "3", "--modes", "4"]).exit_code == 2
    assert runner.invoke(main, ["run", "full-swap", "--statistics", "bogus"]).exit_code == 2
    assert runner.invoke(main, ["run", "full-swap", "--statistics", "mixed:ab"]).exit_code == 2
    assert runner.invoke(main, ["run", "full-swap", "--theta", "1.0"]).exit_code == 2
    assert runner.invoke(main, ["run", "unknown"]).exit_code == 2


def test_run_csv_format(runner):
    result = invoke(runner, "run", "half-swap", "--format", "csv")
    rows = list(csv.reader(io.StringIO(result.output)))
    assert rows[0][:3] == ["experiment", "phase_rad", "visibility"]
    assert rows[1][0] == "half-swap"
    assert float(rows[1][1]) == pytest.approx(math.pi, abs=1e-12)


def test_run_output_is_deterministic():
    command = [sys.executable, "-m", "exchange_lab.cli", "run", "ring", "--n", "4", "--seed", "5"]
    outputs = {
        subprocess.run(command, capture_output=True, text=True).stdout for _ in range(2)
    }
    assert len(outputs) == 1


# ---------------------------------------------------------------- verify


def test_verify_passes_and_reports_the_audit(runner):
    result = invoke(runner, "verify", "--modes", "4", "--trials", "25", "--seed", "1")
    assert result.exit_code == 0
    assert "VERIFY PASS" in result.output
    assert "equation audit" in result.output
    assert "-|1010⟩" in result.output and "|1010⟩" in result.output


def test_verify_rejects_modes_above_cap(runner):
    result = runner.invoke(main, ["verify", "--modes", "20"])
    assert result.exit_code == 2
    assert "cap" in result.output


def test_verify_zero_trials_pass(runner):
    result = invoke(runner, "verify", "--modes", "4", "--trials", "0")
    assert result.exit_code == 0
    assert "trials=0" in result.output


# -------------------------------------------------------------- attribute


def test_attribute_half_swap_table(runner):
    result = invoke(runner, "attribute", "half-swap")
    rows = list(csv.reader(io.StringIO(result.output)))
    header = rows[0]
    assert header == ["branch", "step", "op", "from", "to", "interval_parity", "sign", "wrap"]
    body = [row for row in rows[1:] if row[2].startswith("hop")]
    negative = [row for row in body if row[6] == "-1"]
    assert len(negative) == 1
    assert negative[0][0] == "backward" and (negative[0][3], negative[0][4]) == ("1", "4")
    footer = [row for row in rows if row[2] == "relative-phase-rad"]
    assert float(footer[0][6]) == pytest.approx(math.pi, abs=1e-12)


def test_attribute_boson_all_positive(runner):
    result = invoke(runner, "attribute", "half-swap", "--statistics", "boson")
    rows = list(csv.reader(io.StringIO(result.output)))
    body = [row for row in rows[1:] if row[2].startswith("hop")]
    assert body and all(row[6] == "1" for row in body)


def test_attribute_ring_four_wrap_row(runner):
    result = invoke(runner, "attribute", "ring", "--n", "4")
    rows = list(csv.reader(io.StringIO(result.output)))
    wrap_rows = [row for row in rows[1:] if row[7] == "True"]
    assert len(wrap_rows) == 1
    assert wrap_rows[0][5] == "3" and wrap_rows[0][6] == "-1"
    footer = [row for row in rows if row[2] == "relative-phase-rad"]
    assert float(footer[0][6]) == pytest.approx(math.pi, abs=1e-12)


def test_attribute_rejects_literal_mode(runner):
    result = runner.invoke(main, ["attribute", "half-swap", "--mode", "literal"])
    assert result.exit_code == 2


def test_attribute_json_format(runner):
    result = invoke(runner, "attribute", "half-swap", "--format", "json")
    payload = json.loads(result.output)
    assert payload["branch_sign_products"] == [1, -1]
    assert payload["phase_rad"] == pytest.approx(math.pi, abs=1e-12)
    assert {row["branch"] for row in payload["rows"]} == {"forward", "backward"}


# -------------------------------------------------------------- reference


def test_reference_cow(runner):
    payload = {"kind": "cow", "height_m": 0.01, "time_s": 1e-3}
    result = invoke(runner, "reference", input=json.dumps(payload))
    out = json.loads(result.output)
    expected = 1.67492749804e-27 * 9.80665 * 0.01 * 1e-3 / 1.054571817e-34
    assert out["phase_rad"] == pytest.approx(expected, rel=1e-12)


def test_reference_optical_half_wave(runner):
    payload = {
        "kind": "optical-path",
        "profile1": [[2.5e-7, 1.0]],
        "profile2": [],
        "wavelength_m": 5e-7,
    }
    result = invoke(runner, "reference", input=json.dumps(payload))
    assert json.loads(result.output)["phase_rad"] == math.pi


def test_reference_rejects_unknown_fields(runner):
    payload = {"kind": "cow", "height_m": 0.01, "time_s": 1e-3, "temperature": 300}
    result = runner.invoke(main, ["reference"], input=json.dumps(payload))
    assert result.exit_code == 2
    result = runner.invoke(main, ["reference"], input=json.dumps({"kind": "magnetic"}))
    assert result.exit_code == 2
    result = runner.invoke(main, ["reference"], input="not json")
    assert result.exit_code == 2


def test_reference_rejects_bad_values(runner):
    payload = {"kind": "optical-path", "profile1": [], "profile2": [], "wavelength_m": -1.0}
    result = runner.invoke(main, ["reference"], input=json.dumps(payload))
    assert result.exit_code == 2


# ------------------------------------------------------------- exit codes


def test_invalid_result_exits_three(runner, monkeypatch):
    import exchange_lab.cli as cli_module

    def broken(*args, **kwargs):
        result = cli_module.experiment_half_swap_interference()
        result.valid = False
        return result

    monkeypatch.setattr(cli_module, "_run_named", broken)
    result = runner.invoke(main, ["run", "half-swap"])
    assert result.exit_code == 3
