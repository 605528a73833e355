"""The reactive loop: external changes in, rule effects out, tick by tick.

One tick applies the pending external changes to the current store, runs
the whole rule block against the ⟨previous, current'⟩ dual store, then
layers the joined effects onto the store while resetting every implicit
event that was set in the previous step.  The store handed to the next
tick as "previous" is the post-external, pre-internal one, which is what
edge detection must compare against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import EntityDecl, RuleAst
from .diagnostics import Diagnostic, Severity, error
from .domains import (
    UNDEF,
    ConflictError,
    DualStore,
    Entity,
    EnvInterface,
    Store,
    Value,
    value_type_matches,
)
from .rule_eval import FiredRule, TriggerMode, eval_rule_block
from .spec_eval import CheckedProgram, build_entity


# ── External changes ─────────────────────────────────────────────


@dataclass(frozen=True)
class EventUpdate:
    """A sensor reading arriving from outside; implicit (action-named)
    events cannot be written externally."""

    entity: str
    event: str
    value: Value


@dataclass(frozen=True)
class AttributeUpdate:
    entity: str
    attribute: str
    value: Value


@dataclass(frozen=True)
class Deploy:
    decl: EntityDecl


@dataclass(frozen=True)
class Remove:
    entity: str


ExternalChange = EventUpdate | AttributeUpdate | Deploy | Remove


class ExternalChangeError(Exception):
    """A tick's external changes did not validate against the store."""

    def __init__(self, diagnostics: list[Diagnostic], tick: int | None = None):
        self.diagnostics = diagnostics
        self.tick = tick
        super().__init__("; ".join(d.message for d in diagnostics))


# ── Run state and tick records ───────────────────────────────────


@dataclass(frozen=True)
class RunState:
    previous: Store
    current: Store
    tick: int


def initial_state(store: Store) -> RunState:
    """Tick 0: the initial store, with an empty store standing in as its
    nonexistent predecessor."""
    return RunState(previous={}, current=store, tick=0)


@dataclass(frozen=True)
class TickRecord:
    """One orchestration step's output: what came in, what fired, and the
    full post-step store."""

    tick: int
    changes: tuple[ExternalChange, ...]
    fired: tuple[FiredRule, ...]
    snapshot: Store
    conflict: str | None = None


# ── The step and the loop ────────────────────────────────────────


def apply_external(
    changes: list[ExternalChange] | tuple[ExternalChange, ...],
    store: Store,
    env: EnvInterface,
) -> Store:
    """Validate and apply one tick's external changes: removals first, then
    deployments, then event/attribute writes.  Any invalid change aborts the
    whole tick with an :class:`ExternalChangeError` listing every problem.
    """
    diagnostics: list[Diagnostic] = []
    out = dict(store)

    for change in changes:
        if isinstance(change, Remove):
            if change.entity not in out:
                diagnostics.append(
                    error("unknown-entity", f"cannot remove unknown entity {change.entity!r}")
                )
                continue
            del out[change.entity]

    for change in changes:
        if isinstance(change, Deploy):
            if change.decl.name in out:
                diagnostics.append(
                    error(
                        "duplicate-entity",
                        f"entity {change.decl.name!r} is already deployed",
                        change.decl.span,
                    )
                )
                continue
            entity, diags = build_entity(change.decl, env)
            diagnostics.extend(d for d in diags if d.severity is Severity.ERROR)
            if entity is not None:
                out[change.decl.name] = entity

    for change in changes:
        if isinstance(change, (Remove, Deploy)):
            continue
        entity = out.get(change.entity)
        if entity is None:
            diagnostics.append(
                error("unknown-entity", f"cannot update unknown entity {change.entity!r}")
            )
            continue
        iface = env[entity.interface_id]
        if isinstance(change, EventUpdate):
            if change.event in iface.actions:
                diagnostics.append(
                    error(
                        "implicit-event-write",
                        f"{change.entity}.{change.event} is an implicit event and "
                        "cannot be written externally",
                    )
                )
                continue
            declared = iface.events.get(change.event)
            if declared is None:
                diagnostics.append(
                    error(
                        "unknown-member",
                        f"interface {entity.interface_id!r} has no event {change.event!r}",
                    )
                )
                continue
            if not value_type_matches(change.value, declared):
                diagnostics.append(
                    error(
                        "type-mismatch",
                        f"event {change.entity}.{change.event} carries {declared.value}, "
                        f"got {change.value!r}",
                    )
                )
                continue
            events = dict(entity.events)
            events[change.event] = change.value
            out[change.entity] = Entity(
                entity.interface_id, entity.attributes, dict(sorted(events.items()))
            )
        else:
            declared = iface.attributes.get(change.attribute)
            if declared is None:
                diagnostics.append(
                    error(
                        "unknown-member",
                        f"interface {entity.interface_id!r} has no attribute "
                        f"{change.attribute!r}",
                    )
                )
                continue
            if not value_type_matches(change.value, declared):
                diagnostics.append(
                    error(
                        "type-mismatch",
                        f"attribute {change.entity}.{change.attribute} carries "
                        f"{declared.value}, got {change.value!r}",
                    )
                )
                continue
            attributes = dict(entity.attributes)
            attributes[change.attribute] = change.value
            out[change.entity] = Entity(
                entity.interface_id, dict(sorted(attributes.items())), entity.events
            )

    if diagnostics:
        raise ExternalChangeError(diagnostics)
    return dict(sorted(out.items()))


def apply_internal(env: EnvInterface, effects: Store, sigma_prime: Store) -> Store:
    """Finish the tick: reset every implicit event that was set in
    ``sigma_prime`` back to UNDEF, then layer the rule effects on top
    (effect values win over the reset; genuine conflicts were already
    caught while the effects were joined)."""
    out: Store = {}
    for entity_id, entity in sigma_prime.items():
        iface = env.get(entity.interface_id)
        implicit = iface.actions if iface is not None else {}
        events = {
            key: (UNDEF if key in implicit and value is not UNDEF else value)
            for key, value in entity.events.items()
        }
        out[entity_id] = Entity(entity.interface_id, entity.attributes, events)
    for entity_id, produced in effects.items():
        base = out.get(entity_id)
        if base is None:
            out[entity_id] = produced
            continue
        out[entity_id] = Entity(
            base.interface_id,
            dict(sorted({**base.attributes, **produced.attributes}.items())),
            dict(sorted({**base.events, **produced.events}.items())),
        )
    return dict(sorted(out.items()))


def step(
    state: RunState,
    changes: list[ExternalChange] | tuple[ExternalChange, ...],
    rules: tuple[RuleAst, ...] | list[RuleAst],
    env: EnvInterface,
    mode: TriggerMode,
    strict_conflicts: bool = True,
) -> tuple[RunState, TickRecord]:
    """Run one orchestration step and return the new state plus its record."""
    tick = state.tick + 1
    try:
        sigma_prime = apply_external(changes, state.current, env)
    except ExternalChangeError as exc:
        exc.tick = tick
        raise
    conflict: str | None = None
    try:
        effects, fired = eval_rule_block(
            env, rules, DualStore(state.previous, sigma_prime), mode
        )
    except ConflictError as exc:
        if strict_conflicts:
            exc.tick = tick
            raise
        conflict = str(exc)
        effects, fired = {}, []
    snapshot = apply_internal(env, effects, sigma_prime)
    record = TickRecord(tick, tuple(changes), tuple(fired), snapshot, conflict)
    return RunState(sigma_prime, snapshot, tick), record


def run_trace(
    program: CheckedProgram,
    script: list[list[ExternalChange]],
    mode: TriggerMode = TriggerMode.EDGE,
    max_ticks: int | None = None,
    strict_conflicts: bool = True,
) -> list[TickRecord]:
    """Fold :func:`step` over a finite script, one change list per tick.

    Deterministic: identical inputs produce identical records.  An empty
    script yields an empty trace; the initial store is reported separately
    by callers that want it.
    """
    if not program.ok:
        raise ValueError("program has check errors; refusing to run")
    ticks = script if max_ticks is None else script[:max_ticks]
    state = initial_state(program.initial_store)
    records: list[TickRecord] = []
    for changes in ticks:
        state, record = step(
            state, changes, program.rules, program.env, mode, strict_conflicts
        )
        records.append(record)
    return records
