"""Tick-record rendering: content, ordering, determinism, injectivity."""

from __future__ import annotations

import json
import random

from pantagruel import (
    UNDEF,
    Entity,
    EventUpdate,
    TickRecord,
    TriggerMode,
    run_trace,
    serialize_tick,
)
from pantagruel.serialize import store_text


def _record(snapshot, tick=1, changes=(), fired=(), conflict=None):
    return TickRecord(tick, tuple(changes), tuple(fired), snapshot, conflict)


def test_jsonl_entity_payload(building):
    script = [[EventUpdate("m10", "detected", True)]]
    record = run_trace(building, script, mode=TriggerMode.EDGE)[0]
    payload = json.loads(serialize_tick(record, "jsonl"))
    assert payload["tick"] == 1
    assert payload["entities"]["l10"] == {
        "interface": "Light",
        "attributes": {"room": 101},
        "events": {"switch": True},
    }
    assert payload["entities"]["l20"]["events"] == {"switch": None}  # undef → null
    assert payload["fired"] == [
        {"rule": 1, "binding": {"l": "l10", "m": "m10"}},
        {"rule": 1, "binding": {"l": "l11", "m": "m10"}},
    ]
    assert payload["changes"] == [
        {"kind": "event", "entity": "m10", "member": "detected", "value": True}
    ]
    assert payload["conflict"] is None


def test_jsonl_keys_sorted_and_bytes_deterministic(building):
    record = run_trace(building, [[EventUpdate("m10", "detected", True)]])[0]
    line = serialize_tick(record, "jsonl")
    assert line == serialize_tick(record, "jsonl")
    keys = list(json.loads(line))
    assert keys == sorted(keys)
    entity_keys = list(json.loads(line)["entities"])
    assert entity_keys == sorted(entity_keys)


def test_empty_store_record():
    line = serialize_tick(_record({}), "jsonl")
    assert json.loads(line)["entities"] == {}
    assert "(empty store)" in serialize_tick(_record({}), "text")


def test_text_format_block(building):
    record = run_trace(building, [[EventUpdate("m10", "detected", True)]])[0]
    text = serialize_tick(record, "text")
    lines = text.splitlines()
    assert lines[0] == "tick 1"
    assert "  event m10.detected = true" in lines
    assert "  rule 1  {l=l10, m=m10}" in lines
    assert any(line.strip().startswith("l10") and "switch=true" in line for line in lines)
    assert any("temperature=undef" in line for line in lines)
    # entity rows appear in sorted id order
    ids = [line.split()[0] for line in lines[lines.index("state:") + 1 :]]
    assert ids == sorted(ids)


def test_conflict_is_rendered():
    record = _record({}, conflict="conflicting values for l10.switch: True vs False")
    assert "conflict" in serialize_tick(record, "text")
    assert (
        json.loads(serialize_tick(record, "jsonl"))["conflict"]
        == "conflicting values for l10.switch: True vs False"
    )


def test_store_text_alignment():
    store = {
        "a": Entity("I", {"k": 1}, {}),
        "longname": Entity("Iface", {}, {"e": UNDEF}),
    }
    lines = store_text(store).splitlines()
    assert lines[0].startswith("  a       ")
    assert lines[1].startswith("  longname")


def test_serialization_separates_distinct_snapshots():
    """Injectivity, sampled: distinct random snapshots never render equal."""
    rng = random.Random(5)

    def snapshot():
        return {
            f"e{i}": Entity(
                "I",
                {"a": rng.randint(0, 3)},
                {"x": rng.choice([True, False, UNDEF, rng.randint(0, 3)])},
            )
            for i in range(rng.randint(1, 3))
        }

    seen: dict[str, dict] = {}
    for _ in range(300):
        snap = snapshot()
        for fmt in ("text", "jsonl"):
            rendered = serialize_tick(_record(snap), fmt)
            if rendered in seen:
                assert seen[rendered] == snap
            seen[rendered] = snap
