#!/usr/bin/env python3
"""
End-to-end tests for the tubenorm command line.
"""

import json
import sys
from pathlib import Path

import pytest
import yaml

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tubenorm.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, main, resolve_output_dir
from tubenorm.run_config import RunConfig
from tubenorm.solver.oracle import circle_annulus_oracle

SMALL_NORM = {
    "command": "norm",
    "curve": {"generator": "circle", "params": {"N": 256}},
    "eps": [0.1],
    "solver": {"ns": 256, "nt": 33, "method": "direct"},
}


def _write_config(tmp_path: Path, data, name: str = "run.yaml") -> Path:
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def _run(command: str, config: Path, out: Path, *extra: str) -> int:
    return main([command, "--config", str(config), "--out", str(out), "--no-display", "--no-logs", *extra])


def test_norm_artifacts_are_byte_identical(tmp_path):
    """Test two runs of one configuration write the same norm.json bytes."""
    config = _write_config(tmp_path, SMALL_NORM)
    assert _run("norm", config, tmp_path / "a") == EXIT_OK
    assert _run("norm", config, tmp_path / "b") == EXIT_OK
    first = (tmp_path / "a" / "norm.json").read_bytes()
    assert first == (tmp_path / "b" / "norm.json").read_bytes()
    assert (tmp_path / "a" / "norm.csv").read_bytes() == (tmp_path / "b" / "norm.csv").read_bytes()
    assert not (tmp_path / "a" / "logs").exists()

    document = json.loads(first)
    assert document["command"] == "norm"
    assert len(document["config_hash"]) == 64
    (solve,) = document["result"]["solves"]
    assert solve["best"] == pytest.approx(circle_annulus_oracle(1.0, 0.1), rel=1e-4)
    assert "wall_time" not in solve
    assert "oracle" in solve
    for path in (tmp_path / "a").iterdir():
        assert document["config_hash"] in path.read_text(encoding="utf-8")
    header = (tmp_path / "a" / "norm.csv").read_text(encoding="utf-8").splitlines()[:2]
    assert header[0].startswith("# command=norm config_hash=")
    assert header[1].startswith("eps,")


def test_threads_do_not_change_the_hash(tmp_path):
    config = _write_config(tmp_path, SMALL_NORM)
    assert _run("norm", config, tmp_path / "a") == EXIT_OK
    assert _run("norm", config, tmp_path / "b", "--threads", "3") == EXIT_OK
    first = json.loads((tmp_path / "a" / "norm.json").read_text(encoding="utf-8"))
    second = json.loads((tmp_path / "b" / "norm.json").read_text(encoding="utf-8"))
    assert first["config_hash"] == second["config_hash"]


def test_invalid_configuration_exits_2_without_artifacts(tmp_path, capsys):
    config = _write_config(tmp_path, {**SMALL_NORM, "eps": [0.05, 0.1]})
    assert _run("norm", config, tmp_path / "out") == EXIT_CONFIG
    assert not (tmp_path / "out").exists()
    assert "Configuration error" in capsys.readouterr().out


def test_unreadable_curve_exits_2_without_artifacts(tmp_path):
    config = _write_config(tmp_path, {"command": "rho", "curve": {"csv": "missing.csv"}})
    assert _run("rho", config, tmp_path / "out") == EXIT_CONFIG
    assert not (tmp_path / "out").exists()


def test_malformed_curve_exits_2_without_artifacts(tmp_path):
    (tmp_path / "points.csv").write_text("a,b\n0,0\n1,0\n1,1\n0,1\n")
    config = _write_config(tmp_path, {"command": "rho", "curve": {"csv": "points.csv"}})
    assert _run("rho", config, tmp_path / "out") == EXIT_CONFIG
    assert not (tmp_path / "out").exists()


def test_wrongly_typed_setting_exits_2(tmp_path, capsys):
    config = _write_config(tmp_path, {**SMALL_NORM, "solver": {"nt": "33"}})
    assert _run("norm", config, tmp_path / "out") == EXIT_CONFIG
    assert "solver.nt" in capsys.readouterr().out


def test_solver_failure_exits_3(tmp_path, capsys):
    data = {**SMALL_NORM, "curve": {"generator": "circle", "params": {"R": 0.05, "N": 256}}}
    config = _write_config(tmp_path, data)
    assert _run("norm", config, tmp_path / "out") == EXIT_SOLVER
    assert "Solver error" in capsys.readouterr().out


def test_unknown_command_is_rejected():
    with pytest.raises(SystemExit) as info:
        main(["spin"])
    assert info.value.code == 2


def test_rho_reports_transverse_crossings(tmp_path):
    config = _write_config(tmp_path, {"command": "rho", "curve": {"generator": "lemniscate"}, "eps": [0.05]})
    assert _run("rho", config, tmp_path / "out") == EXIT_OK
    result = json.loads((tmp_path / "out" / "rho.json").read_text(encoding="utf-8"))["result"]
    assert result["transverse"] is True
    assert result["admissible"] == [{"eps": 0.05, "admissible": False}]
    assert result["members"][0]["self_intersecting"] is True


def test_rho_of_open_curves(tmp_path):
    """Test a tilted segment reports an unbounded radius and a bent open curve a finite one."""
    segment = {"generator": "straight_segment", "params": {"length": 3.0, "angle": 0.5}}
    config = _write_config(tmp_path, {"command": "rho", "curve": segment, "eps": [0.1]})
    assert _run("rho", config, tmp_path / "segment") == EXIT_OK
    result = json.loads((tmp_path / "segment" / "rho.json").read_text(encoding="utf-8"))["result"]
    assert result["rho"] == "unbounded"
    assert result["crossings"] == []
    assert result["members"][0]["kind"] == "open"
    assert result["admissible"] == [{"eps": 0.1, "admissible": True}]

    bent = _write_config(tmp_path, {"command": "rho", "curve": {"generator": "straight_ended_curve"}})
    assert _run("rho", bent, tmp_path / "bent") == EXIT_OK
    result = json.loads((tmp_path / "bent" / "rho.json").read_text(encoding="utf-8"))["result"]
    assert isinstance(result["rho"], float)
    assert result["rho"] > 0.0


def test_session_logs_are_written_by_default(tmp_path):
    config = _write_config(tmp_path, {"command": "rho", "curve": {"generator": "circle"}})
    assert main(["rho", "--config", str(config), "--out", str(tmp_path / "out"), "--no-display"]) == EXIT_OK
    (session,) = (tmp_path / "out" / "logs").iterdir()
    events = [
        json.loads(line)["event_type"]
        for line in (session / "events.jsonl").read_text(encoding="utf-8").splitlines()
    ]
    assert events[0] == "session_started"
    assert "artifact_written" in events
    assert events[-1] == "session_ended"


def test_output_directory_resolution(tmp_path, monkeypatch):
    config = RunConfig.create_rho_config()
    monkeypatch.delenv("TUBENORM_OUTPUT_DIR", raising=False)
    monkeypatch.chdir(tmp_path)
    assert resolve_output_dir(None, config) == Path("results")
    monkeypatch.setenv("TUBENORM_OUTPUT_DIR", str(tmp_path / "env"))
    assert resolve_output_dir(None, config) == tmp_path / "env"
    assert resolve_output_dir("explicit", config) == Path("explicit")


@pytest.mark.slow
def test_caps_command(tmp_path):
    config = _write_config(tmp_path, {"command": "caps", "cap": {"L": 4.0, "h": 0.1}, "seed": 7})
    assert _run("caps", config, tmp_path / "out") == EXIT_OK
    result = json.loads((tmp_path / "out" / "caps.json").read_text(encoding="utf-8"))["result"]
    assert result["comparison"]["positive"] is True
    assert result["comparison"]["below_estimate"] is True
    assert result["decay"]["within_bounds"] is True
    assert result["comparison"]["max_abs_laplacian"] <= 1e-12
