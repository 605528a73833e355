"""Command-line behavior: exit codes, output bytes, REPL equivalence."""

from __future__ import annotations

import io
import json

import pytest

from pantagruel.cli import main

from conftest import BUILDING_FULL, BUILDING_RULES_13, BUILDING_RUNNABLE, program_source

GOLDEN_SCRIPT = """\
event m10.detected = true
tick
event thermo.temperature = 30
tick
event thermo.temperature = 29
tick
event thermo.temperature = 30
tick
"""

CONFLICT_PROGRAM = program_source(
    "when event detected from m:MotionDetector value = true "
    "trigger action switch(true) on l:Light end\n",
    "when event detected from m:MotionDetector value = true "
    "trigger action switch(false) on l:Light end\n",
)


@pytest.fixture()
def files(tmp_path):
    def write(name, content):
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)

    return write


# ── check ────────────────────────────────────────────────────────


def test_check_clean_program(files, capsys):
    path = files("ok.ptg", BUILDING_RULES_13)
    assert main(["check", path]) == 0
    out = capsys.readouterr()
    assert out.out == "" and out.err == ""


def test_check_rejects_aggregate_rule(files, capsys):
    path = files("full.ptg", BUILDING_FULL)
    assert main(["check", path]) == 1
    assert "all ... groupby" in capsys.readouterr().err


def test_check_type_mismatch_points_at_literal(files, capsys):
    src = "interface Light { attribute room : Integer }\nl10:Light { room : true }\nrules end"
    path = files("bad.ptg", src)
    assert main(["check", path]) == 1
    err = capsys.readouterr().err
    # <path>:<line>:<col>: <severity>: <message>, at the literal's span
    assert f"{path}:2:20: error:" in err


def test_check_parse_errors_reported(files, capsys):
    path = files("broken.ptg", "interface { }\nrules end")
    assert main(["check", path]) == 1
    assert "error:" in capsys.readouterr().err


def test_check_missing_file_is_io_error(capsys):
    assert main(["check", "/nonexistent/program.ptg"]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_check_binary_file_is_io_error(tmp_path, capsys):
    path = tmp_path / "junk.ptg"
    path.write_bytes(b"\xff\xfe\x00garbage\x80")
    assert main(["check", str(path)]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_repl_undecodable_stream_exits_cleanly(files, capsys, monkeypatch):
    class BadStdin:
        def isatty(self):
            return False

        def readline(self):
            raise UnicodeDecodeError("utf-8", b"\xff", 0, 1, "invalid start byte")

    program = files("b.ptg", BUILDING_RUNNABLE)
    monkeypatch.setattr("sys.stdin", BadStdin())
    assert main(["repl", program]) == 1
    assert "undecodable" in capsys.readouterr().err


def test_check_warnings_alone_still_exit_zero(files, capsys):
    src = "interface Light { attribute room : Integer }\nl10:Light {}\nrules end"
    path = files("warn.ptg", src)
    assert main(["check", path]) == 0
    assert "warning:" in capsys.readouterr().err


# ── run ──────────────────────────────────────────────────────────


def test_run_emits_byte_identical_traces(files, capsys):
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("b.evs", GOLDEN_SCRIPT)
    argv = ["run", program, "--script", script, "--emit-initial"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    assert first.startswith("tick 0\n")


def test_run_jsonl_trace(files, capsys):
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("b.evs", GOLDEN_SCRIPT)
    assert main(["run", program, "--script", script, "--format", "jsonl"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    ticks = [json.loads(line) for line in lines]
    assert [t["tick"] for t in ticks] == [1, 2, 3, 4]
    assert ticks[1]["entities"]["fan10"]["events"]["setSpeed"] == 10


def test_run_level_mode_flag(files, capsys):
    # under level reading the motion rule refires on the quiet tick, so the
    # switch events are set again after the reset
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("b.evs", "event m10.detected = true\ntick\ntick\n")
    argv = ["run", program, "--script", script, "--format", "jsonl", "--mode", "level"]
    assert main(argv) == 0
    ticks = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert ticks[1]["entities"]["l10"]["events"]["switch"] is True
    assert any(f["rule"] == 1 for f in ticks[1]["fired"])


def test_run_max_ticks(files, capsys):
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("b.evs", GOLDEN_SCRIPT)
    assert main(["run", program, "--script", script, "--format", "jsonl", "--max-ticks", "2"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 2


def test_run_comments_only_script_is_empty_trace(files, capsys):
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("empty.evs", "# nothing here\n")
    assert main(["run", program, "--script", script]) == 0
    assert capsys.readouterr().out == ""


def test_run_script_syntax_error(files, capsys):
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("bad.evs", "tick\nwat\n")
    assert main(["run", program, "--script", script]) == 1
    assert "line 2" in capsys.readouterr().err


def test_run_missing_script_is_io_error(files, capsys):
    program = files("b.ptg", BUILDING_RUNNABLE)
    assert main(["run", program, "--script", "/nonexistent.evs"]) == 2
    capsys.readouterr()


def test_run_refuses_unchecked_program(files, capsys):
    program = files("full.ptg", BUILDING_FULL)
    script = files("b.evs", GOLDEN_SCRIPT)
    assert main(["run", program, "--script", script]) == 1
    capsys.readouterr()


def test_run_conflict_exits_3_and_names_the_key(files, capsys):
    program = files("c.ptg", CONFLICT_PROGRAM)
    script = files("c.evs", "event m10.detected = true\ntick\n")
    assert main(["run", program, "--script", script]) == 3
    err = capsys.readouterr().err
    assert "conflict at tick 1" in err
    assert "l10.switch" in err


def test_run_no_strict_conflicts_continues(files, capsys):
    program = files("c.ptg", CONFLICT_PROGRAM)
    script = files("c.evs", "event m10.detected = true\ntick\ntick\n")
    argv = ["run", program, "--script", script, "--no-strict-conflicts", "--format", "jsonl"]
    assert main(argv) == 0
    ticks = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert len(ticks) == 2
    assert "l10.switch" in ticks[0]["conflict"]
    assert ticks[0]["fired"] == []
    assert ticks[0]["entities"]["l10"]["events"]["switch"] is None  # effects dropped
    assert ticks[1]["conflict"] is None


def test_run_external_error_reports_tick(files, capsys):
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("b.evs", "tick\nevent ghost.detected = true\ntick\n")
    assert main(["run", program, "--script", script]) == 1
    assert "tick 2" in capsys.readouterr().err


# ── repl ─────────────────────────────────────────────────────────


def _repl(monkeypatch, capsys, argv, lines):
    monkeypatch.setattr("sys.stdin", io.StringIO(lines))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_repl_matches_scripted_run(files, capsys, monkeypatch):
    program = files("b.ptg", BUILDING_RUNNABLE)
    script = files("b.evs", GOLDEN_SCRIPT)
    assert main(["run", program, "--script", script]) == 0
    scripted = capsys.readouterr().out
    code, out, _ = _repl(
        monkeypatch, capsys, ["repl", program], GOLDEN_SCRIPT + "quit\n"
    )
    assert code == 0
    assert out == scripted


def test_repl_tick_without_changes(files, capsys, monkeypatch):
    program = files("b.ptg", BUILDING_RUNNABLE)
    code, out, _ = _repl(monkeypatch, capsys, ["repl", program, "--format", "jsonl"], "tick\n")
    assert code == 0
    record = json.loads(out)
    assert record["changes"] == [] and record["tick"] == 1


def test_repl_state_and_quit(files, capsys, monkeypatch):
    program = files("b.ptg", BUILDING_RUNNABLE)
    code, out, _ = _repl(monkeypatch, capsys, ["repl", program], "state\nquit\nstate\n")
    assert code == 0
    assert "m10" in out and "tick" not in out  # state only, nothing after quit


def test_repl_malformed_line_continues(files, capsys, monkeypatch):
    program = files("b.ptg", BUILDING_RUNNABLE)
    code, out, err = _repl(
        monkeypatch,
        capsys,
        ["repl", program, "--format", "jsonl"],
        "wat\nevent m10.detected = true\ntick\nquit\n",
    )
    assert code == 0
    assert "error:" in err
    assert json.loads(out)["entities"]["l10"]["events"]["switch"] is True


def test_repl_emit_initial(files, capsys, monkeypatch):
    program = files("b.ptg", BUILDING_RUNNABLE)
    code, out, _ = _repl(
        monkeypatch, capsys, ["repl", program, "--emit-initial", "--format", "jsonl"], "quit\n"
    )
    assert code == 0
    assert json.loads(out)["tick"] == 0


def test_repl_conflict_strict_exits_3(files, capsys, monkeypatch):
    program = files("c.ptg", CONFLICT_PROGRAM)
    code, _, err = _repl(
        monkeypatch, capsys, ["repl", program], "event m10.detected = true\ntick\n"
    )
    assert code == 3
    assert "conflict at tick 1" in err
