from __future__ import annotations

import json
import pytest

from membuoy.cli import main

from conftest import SCENARIOS_DIR


@pytest.fixture()
def solo_path() -> str:
    return str(SCENARIOS_DIR / "solo-task.json")


def run_cli(*argv: str) -> int:
    return main(list(argv))


def test_gen_writes_deterministic_scenario(tmp_path):
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    assert run_cli("gen", "--template", "solo-task", "--seed", "1", "--out", str(out_a)) == 0
    assert run_cli("gen", "--template", "solo-task", "--seed", "1", "--out", str(out_b)) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert out_a.read_text() == (SCENARIOS_DIR / "solo-task.json").read_text()


def test_gen_param_forwarding(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run_cli(
        "gen", "--template", "solo-task", "--seed", "2", "--param", "days=3",
        "--out", str(out),
    ) == 0
    doc = json.loads(out.read_text())
    assert len(doc["events"]) == 3


def test_gen_unknown_template_exit_code():
    assert run_cli("gen", "--template", "nope") == 4


def test_run_emits_atomic_artifacts(tmp_path, solo_path):
    out = tmp_path / "out"
    assert run_cli("run", solo_path, "--out", str(out)) == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "final_mb.csv", "report.json", "report.txt",
    ]
    report = json.loads((out / "report.json").read_text())
    assert report["applied"] == 10
    assert report["complete"] is True
    csv_lines = (out / "final_mb.csv").read_text().strip().split("\n")
    assert csv_lines[0] == "family,resource,user,context,mb"
    assert any(line.startswith("global,task1,user1,,0.941843") for line in csv_lines)


def test_run_byte_identical_outputs(tmp_path, solo_path):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert run_cli("run", solo_path, "--out", str(out1)) == 0
    assert run_cli("run", solo_path, "--out", str(out2)) == 0
    for name in ("report.json", "report.txt", "final_mb.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_run_watch_restricts_tables(tmp_path, solo_path):
    out = tmp_path / "out"
    assert run_cli("run", solo_path, "--watch", "task1", "--out", str(out)) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["watch"] == ["task1"]
    assert set(report["rows"][0]["before"].keys()) == {"task1"}


def test_run_malformed_scenario_leaves_no_output(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x"}')
    out = tmp_path / "out"
    assert run_cli("run", str(bad), "--out", str(out)) == 4
    assert not out.exists()


def test_run_missing_file_exit_code(tmp_path):
    assert run_cli("run", str(tmp_path / "missing.json")) == 3


def test_run_save_and_resume_equals_uninterrupted(tmp_path, solo_path):
    full_out = tmp_path / "full"
    assert run_cli("run", solo_path, "--out", str(full_out)) == 0
    state = tmp_path / "mid.json"
    part_out = tmp_path / "part"
    assert run_cli(
        "run", solo_path, "--upto", "5", "--save-state", str(state), "--out", str(part_out)
    ) == 0
    resumed_out = tmp_path / "resumed"
    assert run_cli(
        "run", solo_path, "--from-state", str(state), "--out", str(resumed_out)
    ) == 0
    assert (resumed_out / "final_mb.csv").read_bytes() == (full_out / "final_mb.csv").read_bytes()
    full_report = json.loads((full_out / "report.json").read_text())
    resumed_report = json.loads((resumed_out / "report.json").read_text())
    assert resumed_report["final"] == full_report["final"]
    assert resumed_report["rows"] == full_report["rows"][5:]


def test_resume_rejects_snapshot_from_other_scenario(tmp_path, solo_path):
    state = tmp_path / "mid.json"
    assert run_cli("run", solo_path, "--upto", "2", "--save-state", str(state)) == 0
    other = str(SCENARIOS_DIR / "rome-trip.json")
    assert run_cli("run", other, "--from-state", str(state)) == 5


def test_snapshot_load_of_truncated_file_names_missing_section(tmp_path, solo_path, capsys):
    state = tmp_path / "mid.json"
    assert run_cli("run", solo_path, "--upto", "2", "--save-state", str(state)) == 0
    snapshot = json.loads(state.read_text())
    del snapshot["local"]
    truncated = tmp_path / "truncated.json"
    truncated.write_text(json.dumps(snapshot))
    code = run_cli("snapshot", "load", str(truncated))
    captured = capsys.readouterr()
    assert code == 4
    assert "local" in captured.err


def test_snapshot_save_without_session_fails_cleanly(tmp_path, capsys):
    code = run_cli("snapshot", "save", str(tmp_path / "s.json"))
    assert code == 5
    assert "default" in capsys.readouterr().err


def test_timeline_csv_output(tmp_path, solo_path):
    out = tmp_path / "curve.csv"
    assert run_cli(
        "timeline", solo_path, "--resource", "task1", "--user", "user1",
        "--step", "1d", "--out", str(out),
    ) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "timestamp,mb"
    assert len(lines) == 12
    assert lines[1].endswith("0.450000")


def test_timeline_stdout(capsys, solo_path):
    assert run_cli(
        "timeline", solo_path, "--resource", "task1", "--user", "user1", "--step", "5d"
    ) == 0
    assert capsys.readouterr().out.startswith("timestamp,mb\n")


def test_timeline_window_flags(capsys, solo_path):
    assert run_cli(
        "timeline", solo_path, "--resource", "task1", "--user", "user1", "--step", "1d",
        "--start", "2018-07-04T09:00:00Z", "--end", "2018-07-06T09:00:00Z",
    ) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 4  # header + 3 samples
    assert lines[1].startswith("2018-07-04T09:00:00Z,")
    assert lines[-1].startswith("2018-07-06T09:00:00Z,")


def test_timeline_unknown_resource_exit_code(solo_path):
    assert run_cli(
        "timeline", solo_path, "--resource", "ghost", "--user", "user1", "--step", "1d"
    ) == 5


def test_params_override_via_flag(tmp_path, solo_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"gain": 0.25}))
    out = tmp_path / "out"
    assert run_cli("run", solo_path, "--params", str(params), "--out", str(out)) == 0
    report = json.loads((out / "report.json").read_text())
    first = report["rows"][0]["after"]["task1"]["global"]["user1"]
    assert first == pytest.approx(0.25 * 0.9)


def test_params_override_via_env(tmp_path, solo_path, monkeypatch):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"gain": 0.25}))
    monkeypatch.setenv("MB_PARAMS", str(params))
    out = tmp_path / "out"
    assert run_cli("run", solo_path, "--out", str(out)) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["rows"][0]["after"]["task1"]["global"]["user1"] == pytest.approx(0.225)


def test_bad_params_exit_code(tmp_path, solo_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"gain": 5.0}))
    assert run_cli("run", solo_path, "--params", str(params)) == 4
