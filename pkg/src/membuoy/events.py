"""Event vocabulary and the scenario document format.

A scenario is the unit of simulation: a named graph snapshot plus a
time-ordered stream of user events and an evaluation horizon. Parsing is
total — a document either yields a fully validated Scenario or raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import MalformedDocument, UnknownReference, UnsortedEvents
from .graph import COMPLETABLE_TYPES, Graph, ThingType
from .timeutil import format_timestamp, parse_timestamp


class EventKind(str, Enum):
    VIEW = "view"
    MODIFY = "modify"
    ANNOTATE = "annotate"
    CREATE = "create"
    COMPLETE = "complete"
    CONTEXT_SWITCH = "context_switch"


# Kinds that stimulate a target thing directly.
INTERACTION_KINDS = frozenset(
    {EventKind.VIEW, EventKind.MODIFY, EventKind.ANNOTATE, EventKind.CREATE, EventKind.COMPLETE}
)


@dataclass(frozen=True)
class Event:
    t: float
    actor: str
    kind: EventKind
    target: str | None = None
    context: str | None = None

    def to_obj(self) -> dict:
        obj: dict = {"t": format_timestamp(self.t), "actor": self.actor, "kind": self.kind.value}
        if self.target is not None:
            obj["target"] = self.target
        if self.context is not None:
            obj["context"] = self.context
        return obj


@dataclass
class Scenario:
    name: str
    graph: Graph
    events: list[Event]
    horizon: float

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "horizon": format_timestamp(self.horizon),
            "graph": self.graph.to_obj(),
            "events": [e.to_obj() for e in self.events],
        }

    def to_json(self) -> str:
        """Canonical serialization: sorted keys, two-space indent, newline-terminated."""
        return json.dumps(self.to_obj(), indent=2, sort_keys=True) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.name == other.name
            and self.horizon == other.horizon
            and self.events == other.events
            and self.graph == other.graph
        )


def _decode_event(index: int, row: dict) -> Event:
    if not isinstance(row, dict):
        raise MalformedDocument(f"event[{index}] must be an object")
    for key in ("t", "actor", "kind"):
        if key not in row:
            raise MalformedDocument(f"event[{index}] missing required key {key!r}")
    unknown = set(row) - {"t", "actor", "kind", "target", "context"}
    if unknown:
        raise MalformedDocument(f"event[{index}] has unknown keys {sorted(unknown)}")
    try:
        kind = EventKind(row["kind"])
    except ValueError:
        raise MalformedDocument(f"event[{index}] has unknown kind {row['kind']!r}") from None
    return Event(
        t=parse_timestamp(row["t"]),
        actor=str(row["actor"]),
        kind=kind,
        target=str(row["target"]) if row.get("target") is not None else None,
        context=str(row["context"]) if row.get("context") is not None else None,
    )


def parse_scenario(document: str | dict) -> Scenario:
    """Parse and fully validate a scenario document (JSON text or object)."""
    if isinstance(document, str):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from exc
    else:
        obj = document
    if not isinstance(obj, dict):
        raise MalformedDocument("scenario document must be an object")
    for key in ("name", "horizon", "graph", "events"):
        if key not in obj:
            raise MalformedDocument(f"scenario missing required key {key!r}")
    if not isinstance(obj["events"], list):
        raise MalformedDocument("scenario events must be an array")
    graph = Graph.from_obj(obj["graph"])
    events = [_decode_event(i, row) for i, row in enumerate(obj["events"])]
    scenario = Scenario(
        name=str(obj["name"]),
        graph=graph,
        events=events,
        horizon=parse_timestamp(obj["horizon"]),
    )
    _check_references(scenario)
    _check_order(scenario)
    leftover = validate(scenario)
    if leftover:
        raise MalformedDocument("; ".join(leftover))
    return scenario


def _check_references(scenario: Scenario) -> None:
    for i, e in enumerate(scenario.events):
        for ref in (e.actor, e.target, e.context):
            if ref is not None and ref not in scenario.graph:
                raise UnknownReference(i, ref)


def _check_order(scenario: Scenario) -> None:
    for i in range(1, len(scenario.events)):
        if scenario.events[i].t < scenario.events[i - 1].t:
            raise UnsortedEvents(i)


def validate(scenario: Scenario) -> list[str]:
    """Re-check every scenario invariant; returns violations (empty = ok)."""
    violations: list[str] = []
    graph = scenario.graph
    for i, e in enumerate(scenario.events):
        where = f"event[{i}]"
        if e.t <= 0:
            violations.append(f"{where}: timestamp must be strictly positive")
        for ref in (e.actor, e.target, e.context):
            if ref is not None and ref not in graph:
                violations.append(f"{where}: unknown reference {ref!r}")
        if e.actor in graph and graph.thing(e.actor).type is not ThingType.USER:
            violations.append(f"{where}: actor {e.actor!r} is not a user thing")
        if e.kind in INTERACTION_KINDS:
            if e.target is None:
                violations.append(f"{where}: {e.kind.value} requires a target")
            if e.context is not None:
                violations.append(f"{where}: {e.kind.value} must not carry a context")
            if (
                e.kind is EventKind.COMPLETE
                and e.target is not None
                and e.target in graph
                and graph.thing(e.target).type not in COMPLETABLE_TYPES
            ):
                violations.append(f"{where}: complete target must be a task or calendar event")
        else:  # context switch
            if e.context is None:
                violations.append(f"{where}: context_switch requires a context")
            if e.target is not None:
                violations.append(f"{where}: context_switch must not carry a target")
            if (
                e.context is not None
                and e.context in graph
                and graph.thing(e.context).type is not ThingType.CONTEXT
            ):
                violations.append(f"{where}: {e.context!r} is not a context thing")
    for i in range(1, len(scenario.events)):
        if scenario.events[i].t < scenario.events[i - 1].t:
            violations.append(f"event[{i}]: out of order")
    if scenario.events and scenario.horizon < scenario.events[-1].t:
        violations.append("horizon precedes the last event")
    return violations
