"""The semantic algebra: values, interfaces, entities, stores, references.

Everything here is a plain immutable value; updates build new stores rather
than mutating.  Reads are total (a miss yields ``UNDEF``), merges are
union-shaped with equal-value overlap tolerated, and every iteration order
is lexicographic so downstream traces are byte-deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .ast import TypeTag


class _Undef:
    """The distinct "no value yet" marker; equal only to itself."""

    _instance: "_Undef | None" = None

    def __new__(cls) -> "_Undef":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undef"


UNDEF = _Undef()

# A runtime value: a nonnegative integer, a truth value, or UNDEF.
Value = Union[int, bool, _Undef]


def value_type_matches(value: Value, tag: TypeTag) -> bool:
    if value is UNDEF:
        return True
    if tag is TypeTag.BOOL:
        return type(value) is bool
    return type(value) is int


def value_eq(a: Value, b: Value) -> bool:
    """Equality as used by ``value = X`` tests and filters.

    UNDEF compares unequal to everything, itself included: a test against a
    signal that has never been produced must not hold.  Comparisons across
    Nat/Tr are false rather than an error (static checks make them
    unreachable in checked programs; ``bool`` is deliberately not treated as
    an ``int`` here).
    """
    if a is UNDEF or b is UNDEF:
        return False
    return type(a) is type(b) and a == b


def value_neq(a: Value, b: Value) -> bool:
    """Inequality as used by ``value changed``: UNDEF is one ordinary,
    distinct value, so undef→undef is *no* change while undef→defined is."""
    if a is UNDEF or b is UNDEF:
        return not (a is UNDEF and b is UNDEF)
    return type(a) is not type(b) or a != b


def _same_value(a: Value, b: Value) -> bool:
    return not value_neq(a, b)


# ── Interfaces and entities ──────────────────────────────────────


@dataclass(frozen=True)
class Interface:
    """Typed member signatures; the three name spaces are kept disjoint
    (checked when the specification is evaluated)."""

    attributes: dict[str, TypeTag]
    events: dict[str, TypeTag]
    actions: dict[str, TypeTag]


EnvInterface = dict[str, Interface]


@dataclass(frozen=True)
class Entity:
    """A named runtime object: its interface, attribute values, and event
    values.  Action-named keys in ``events`` are the implicit events."""

    interface_id: str
    attributes: dict[str, Value]
    events: dict[str, Value]


Store = dict[str, Entity]


def new_store() -> Store:
    return {}


# ── Errors ───────────────────────────────────────────────────────


class ConflictError(Exception):
    """Two effect sources wrote different values to the same key: the
    noninterference assumption was violated."""

    def __init__(self, entity_id: str, key: str, left: object, right: object):
        self.entity_id = entity_id
        self.key = key
        self.left = left
        self.right = right
        self.tick: int | None = None
        super().__init__(
            f"conflicting values for {entity_id}.{key}: {left!r} vs {right!r}"
        )


class UnknownEntityError(Exception):
    def __init__(self, entity_id: str):
        self.entity_id = entity_id
        super().__init__(f"unknown entity {entity_id!r}")


# ── Store operations ─────────────────────────────────────────────


def _merge_maps(
    entity_id: str, left: dict[str, Value], right: dict[str, Value]
) -> dict[str, Value]:
    merged = dict(left)
    for key, value in right.items():
        if key in merged and not _same_value(merged[key], value):
            raise ConflictError(entity_id, key, merged[key], value)
        merged[key] = value
    return dict(sorted(merged.items()))


def combine_entities(
    entity_id: str, a: Entity | None, b: Entity | None
) -> Entity | None:
    """Union-merge two partial views of one entity.

    Absent sides pass through; keys present on both sides must carry equal
    values, otherwise the partial states interfere and a
    :class:`ConflictError` is raised.
    """
    if a is None:
        return b
    if b is None:
        return a
    if a.interface_id != b.interface_id:
        raise ConflictError(entity_id, "interface", a.interface_id, b.interface_id)
    return Entity(
        a.interface_id,
        _merge_maps(entity_id, a.attributes, b.attributes),
        _merge_maps(entity_id, a.events, b.events),
    )


def store_join(s1: Store, s2: Store) -> Store:
    """Pointwise :func:`combine_entities` over the union of both key sets."""
    out: Store = {}
    for entity_id in sorted(s1.keys() | s2.keys()):
        combined = combine_entities(entity_id, s1.get(entity_id), s2.get(entity_id))
        assert combined is not None
        out[entity_id] = combined
    return out


def store_join_all(stores: Iterable[Store]) -> Store:
    """Left fold of :func:`store_join`; order-independent when conflict-free."""
    acc: Store = {}
    for store in stores:
        acc = store_join(acc, store)
    return acc


def access_event(event: str, entity_id: str, store: Store) -> Value:
    entity = store.get(entity_id)
    if entity is None:
        return UNDEF
    return entity.events.get(event, UNDEF)


def access_attribute(attribute: str, entity_id: str, store: Store) -> Value:
    entity = store.get(entity_id)
    if entity is None:
        return UNDEF
    return entity.attributes.get(attribute, UNDEF)


def update_event(
    event: str,
    entity_id: str,
    value: Value,
    store: Store,
    governing: Store | None = None,
) -> Store:
    """Functionally set ``entity_id``'s ``event`` to ``value`` in ``store``.

    Partial effect stores accumulate produced effects only, so an entity
    missing from ``store`` but present in the ``governing`` (current) store
    gets a skeleton entry carrying nothing but this event.  An entity the
    governing store also lacks is an error.
    """
    entity = store.get(entity_id)
    if entity is None:
        if governing is not None and entity_id in governing:
            entity = Entity(governing[entity_id].interface_id, {}, {})
        else:
            raise UnknownEntityError(entity_id)
    events = dict(entity.events)
    events[event] = value
    updated = Entity(entity.interface_id, entity.attributes, dict(sorted(events.items())))
    return {**store, entity_id: updated}


def update_attribute(
    attribute: str,
    entity_id: str,
    value: Value,
    store: Store,
    governing: Store | None = None,
) -> Store:
    entity = store.get(entity_id)
    if entity is None:
        if governing is not None and entity_id in governing:
            entity = Entity(governing[entity_id].interface_id, {}, {})
        else:
            raise UnknownEntityError(entity_id)
    attributes = dict(entity.attributes)
    attributes[attribute] = value
    updated = Entity(
        entity.interface_id, dict(sorted(attributes.items())), entity.events
    )
    return {**store, entity_id: updated}


# ── Dual stores, references, entity environments ─────────────────


@dataclass(frozen=True)
class DualStore:
    """The ⟨previous, current⟩ store pair rules are evaluated against;
    read-only during rule evaluation."""

    previous: Store
    current: Store


@dataclass(frozen=True)
class InterfaceRef:
    """The variable still ranges over an interface: not yet instantiated."""

    name: str


@dataclass(frozen=True)
class InstanceRef:
    """The variable is bound to one concrete entity."""

    name: str


Reference = Union[InterfaceRef, InstanceRef]

# Entity environment: rule-scoped variable name → reference.
EnvEntity = dict[str, Reference]

# A deferred predicate awaiting a fully instantiated environment.
BoolFn = Callable[[EnvEntity], bool]


def instantiate(store: Store, rho: EnvEntity) -> list[EnvEntity]:
    """Expand interface-bound variables over every matching entity.

    Each variable bound to ``InterfaceRef(f)`` is independently replaced by
    ``InstanceRef(j)`` for every entity ``j`` in ``store`` whose interface
    is ``f``; instance bindings pass through.  The result enumerates the
    full cross product (lexicographic in variable name, then entity id) and
    is empty as soon as one variable matches no entity.
    """
    open_vars = sorted(v for v, ref in rho.items() if isinstance(ref, InterfaceRef))
    pools: list[list[str]] = []
    for var in open_vars:
        ref = rho[var]
        assert isinstance(ref, InterfaceRef)
        matches = sorted(
            eid for eid, entity in store.items() if entity.interface_id == ref.name
        )
        if not matches:
            return []
        pools.append(matches)
    results: list[EnvEntity] = []
    for combo in itertools.product(*pools):
        env = dict(rho)
        for var, entity_id in zip(open_vars, combo):
            env[var] = InstanceRef(entity_id)
        results.append(env)
    return results
