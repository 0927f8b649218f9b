#!/usr/bin/env python3
"""
Tests for displays, session logging, artifact writing and the plot script.
"""

import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from tubenorm.asymptotics.fitting import CurveMeta, fit_expansion
from tubenorm.errors import IoFailure
from tubenorm.frontend import (
    ArtifactWriter,
    RunLogManager,
    SimpleDisplay,
    create_display,
    emit_plot_script,
    render_plot_script,
)
from tubenorm.solver.oracle import circle_annulus_oracle


def _circle_fit():
    meta = CurveMeta("closed", 2.0 * math.pi, 2.0 * math.pi, name="circle")
    eps_values = [0.1, 0.08, 0.06, 0.04, 0.02]
    return fit_expansion([(eps, circle_annulus_oracle(1.0, eps)) for eps in eps_values], meta)


def test_create_display():
    display = create_display("simple", "norm")
    assert isinstance(display, SimpleDisplay)
    assert display.command == "norm"
    with pytest.raises(ValueError):
        create_display("fancy", "norm")


def test_simple_display_output(capsys):
    display = SimpleDisplay("alpha", show_progress=False)
    display.initialize({"L": 10.0, "h": 0.04}, log_dir="results/logs/x")
    display.update_progress("mesh h=0.04 done")
    display.show_result("End constant", {"alpha": 0.1399171234567, "error_budget": 1e-4})
    display.show_table("Levels", ["h", "alpha"], [[0.04, 0.14], [0.02, 0.1399]])
    display.show_artifacts(["results/alpha.json"])
    out = capsys.readouterr().out
    assert "tubenorm alpha" in out
    assert "mesh h=0.04 done" not in out
    assert "0.139917123" in out
    assert "results/alpha.json" in out
    assert display.get_progress() == ["mesh h=0.04 done"]
    assert display.results["End constant"]["error_budget"] == 1e-4
    assert display.artifacts == ["results/alpha.json"]


def test_non_blocking_log_manager_writes_nothing(tmp_path):
    manager = RunLogManager(tmp_path / "logs", session_id="quiet", non_blocking=True)
    manager.log_solve(0.1, 4.19e-3, 0.5, Ns=512)
    manager.cleanup()
    assert not (tmp_path / "logs").exists()
    summary = manager.get_session_summary()
    assert summary["event_counts"] == {"session_started": 1, "solve_finished": 1, "session_ended": 1}


def test_log_manager_writes_events(tmp_path):
    manager = RunLogManager(tmp_path / "logs", session_id="run")
    try:
        logging.getLogger("tubenorm.test").debug("mirrored to console.log")
        manager.log_artifact(tmp_path / "norm.json")
        with pytest.raises(ValueError):
            manager.log_event("coffee_break")
    finally:
        manager.cleanup()
    lines = (tmp_path / "logs" / "run" / "events.jsonl").read_text(encoding="utf-8").splitlines()
    events = [json.loads(line)["event_type"] for line in lines]
    assert events == ["session_started", "artifact_written", "session_ended"]
    console = (tmp_path / "logs" / "run" / "console.log").read_text(encoding="utf-8")
    assert "mirrored to console.log" in console
    assert not logging.getLogger("tubenorm").handlers


def test_json_artifacts_are_deterministic(tmp_path):
    writer = ArtifactWriter(tmp_path, envelope={"command": "norm", "config_hash": "abc"})
    path = writer.write_json("norm.json", {"b": 1.0 / 3.0, "a": [math.inf, 2]})
    text = path.read_text(encoding="utf-8")
    assert text.endswith("}\n")
    document = json.loads(text)
    assert list(document) == ["command", "config_hash", "result"]
    assert document["result"] == {"a": ["inf", 2], "b": 0.333333333333}
    assert text == writer.render_json({"a": [math.inf, 2], "b": 1.0 / 3.0})
    assert writer.written == [path]


def test_csv_artifacts(tmp_path):
    writer = ArtifactWriter(tmp_path / "out")
    path = writer.write_csv("gamma.csv", ["eps", "g", "finite"], [(0.1, 2.0 / 3.0, True), (0.05, math.inf, False)])
    assert path.read_bytes() == b"eps,g,finite\n0.1,0.666666666667,true\n0.05,inf,false\n"
    with pytest.raises(ValueError):
        writer.write_csv("empty.csv", [], [])
    text_path = writer.write_text("note.txt", "no newline")
    assert text_path.read_text(encoding="utf-8") == "no newline\n"


def test_every_artifact_carries_the_config_hash(tmp_path):
    """Test CSV and text files open with the envelope's provenance comment."""
    envelope = {
        "command": "fit",
        "config_hash": "abc123",
        "seed": 0,
        "versions": {"tubenorm": "0.1.0", "numpy": "1.26.4"},
        "reoriented": False,
    }
    writer = ArtifactWriter(tmp_path, envelope)
    comment = "# command=fit config_hash=abc123 seed=0 versions=numpy:1.26.4,tubenorm:0.1.0"
    csv_path = writer.write_csv("records.csv", ["eps"], [(0.1,)])
    assert csv_path.read_text(encoding="utf-8") == comment + "\neps\n0.1\n"
    script = writer.write_text("fit.gp", render_plot_script(_circle_fit()))
    assert script.read_text(encoding="utf-8").splitlines()[0] == comment
    standalone = emit_plot_script(_circle_fit(), tmp_path / "alone.gp", envelope)
    assert standalone.read_text(encoding="utf-8").startswith(comment + "\n")
    json_path = writer.write_json("fit.json", {})
    assert json.loads(json_path.read_text(encoding="utf-8"))["config_hash"] == "abc123"


def test_artifact_writer_reports_io_failures(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    writer = ArtifactWriter(blocker / "sub")
    with pytest.raises(IoFailure):
        writer.write_text("x.txt", "x")


def test_plot_script(tmp_path):
    fit = _circle_fit()
    text = render_plot_script(fit, "circle.png")
    assert 'set output "circle.png"' in text
    assert "$records << EOD" in text
    assert "c5 = " in text and "c6 = " in text
    assert "c3 = " not in text
    assert render_plot_script(fit, "circle.png") == text
    path = emit_plot_script(fit, tmp_path / "plots" / "fit.gp")
    assert 'set output "fit.png"' in path.read_text(encoding="utf-8")
    with pytest.raises(ValueError):
        render_plot_script(replace(fit, records=[]))
