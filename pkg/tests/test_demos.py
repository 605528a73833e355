"""The shipped demo programs and scripts stay runnable."""

from __future__ import annotations

import json
import pathlib

from pantagruel.cli import main

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"


def test_building_program_checks_clean(capsys):
    assert main(["check", str(DEMOS / "building.ptg")]) == 0
    assert capsys.readouterr().err == ""


def test_aggregate_variant_is_rejected(capsys):
    assert main(["check", str(DEMOS / "building_aggregate.ptg")]) == 1
    assert "groupby" in capsys.readouterr().err


def test_trace_script_runs_the_documented_story(capsys):
    argv = [
        "run",
        str(DEMOS / "building.ptg"),
        "--script",
        str(DEMOS / "trace.evs"),
        "--format",
        "jsonl",
    ]
    assert main(argv) == 0
    ticks = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [t["tick"] for t in ticks] == [1, 2, 3, 4]
    assert ticks[0]["entities"]["l10"]["events"]["switch"] is True
    assert ticks[1]["entities"]["fan10"]["events"]["setSpeed"] == 10
    assert ticks[1]["entities"]["l10"]["events"]["switch"] is None
    assert all(t["fired"] == [] for t in ticks[2:])


def test_deployment_script_switches_the_new_light(capsys):
    argv = [
        "run",
        str(DEMOS / "building.ptg"),
        "--script",
        str(DEMOS / "deployment.evs"),
        "--format",
        "jsonl",
    ]
    assert main(argv) == 0
    final = json.loads(capsys.readouterr().out.splitlines()[-1])
    switched = {
        eid
        for eid, entity in final["entities"].items()
        if entity["events"].get("switch") is True
    }
    assert switched == {"l10", "l11", "l30"}
