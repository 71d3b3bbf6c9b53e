"""Command-line interface: exit codes and output formats."""

import json

from pap_lab.cli import main

SCENARIO = {
    "seed": 11,
    "tags": [
        {"label": "t1", "id": 1, "name": 7, "key": "random"},
        {"label": "t2", "id": 2, "name": 8, "key": "random"},
    ],
    "readers": [
        {"label": "rc", "kind": "checkout"},
        {"label": "rr", "kind": "return"},
    ],
    "program": [
        {"session": {"subprotocol": "checkout", "tag": "t1", "reader": "rc"}},
        {"attack": {"name": "impersonate", "target": "t2",
                    "reader_1": "rc", "reader_2": "rr"}},
    ],
}


def write_scenario(tmp_path, doc=None):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc or SCENARIO))
    return path


def test_run_and_summarize_round_trip(tmp_path, capsys):
    scenario = write_scenario(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(scenario), "--out", str(out)]) == 0
    assert (out / "report.json").exists()
    capsys.readouterr()

    assert main(["summarize", "--in", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["files"] == 2
    assert summary["sessions_observed"] == 3   # one honest + two impersonation halves


def test_json_format_prints_report(tmp_path, capsys):
    scenario = write_scenario(tmp_path)
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(scenario), "--out", str(out),
                 "--format", "json"]) == 0
    printed = json.loads(capsys.readouterr().out)
    on_disk = json.loads((out / "report.json").read_text())
    assert printed == on_disk


def test_seed_override_changes_outputs(tmp_path):
    scenario = write_scenario(tmp_path)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    main(["run", "--scenario", str(scenario), "--out", str(out1)])
    main(["run", "--scenario", str(scenario), "--out", str(out2), "--seed", "999"])
    assert (out1 / "report.json").read_bytes() != (out2 / "report.json").read_bytes()


def test_step_error_exit_code(tmp_path, capsys):
    doc = json.loads(json.dumps(SCENARIO))
    doc["program"].insert(0, {"session": {"subprotocol": "return",
                                          "tag": "t1", "reader": "rr"}})
    scenario = write_scenario(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(scenario), "--out", str(out)]) == 1
    capsys.readouterr()


def test_halt_on_error_flag(tmp_path, capsys):
    doc = json.loads(json.dumps(SCENARIO))
    doc["program"].insert(0, {"session": {"subprotocol": "return",
                                          "tag": "t1", "reader": "rr"}})
    scenario = write_scenario(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["run", "--scenario", str(scenario), "--out", str(out),
                 "--halt-on-error"]) == 1
    report = json.loads((out / "report.json").read_text())
    assert report["halted"] and len(report["steps"]) == 1
    capsys.readouterr()


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["run", "--scenario", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "ParseError" in capsys.readouterr().err


def test_missing_scenario_file(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    assert main(["run", "--scenario", str(missing), "--out", str(tmp_path / "o")]) == 2
    capsys.readouterr()
