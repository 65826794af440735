"""In-memory semantic graph of uniquely identified "things".

Things carry a type, text literals (labels, comments) and optional task or
calendar metadata. Relations are stored as directed (source, target, label)
triples but all neighborhood queries treat them as undirected, matching how
stimulation spreads through the graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    DuplicateThing,
    InvalidRelation,
    InvalidThing,
    MalformedDocument,
    NotAContext,
    UnknownThing,
)
from .timeutil import format_timestamp, parse_timestamp

MEMBER_OF_CONTEXT = "memberOfContext"
ATTENDEE = "attendee"


class ThingType(str, Enum):
    EMAIL = "email"
    PERSON = "person"
    TASK = "task"
    CALENDAR_EVENT = "calendar_event"
    DOCUMENT = "document"
    PRESENTATION = "presentation"
    PROJECT = "project"
    TOPIC = "topic"
    WEB_PAGE = "web_page"
    CONTEXT = "context"
    USER = "user"
    GENERIC = "generic"


# Thing types whose "completed" flag is meaningful.
COMPLETABLE_TYPES = frozenset({ThingType.TASK, ThingType.CALENDAR_EVENT})


@dataclass
class Thing:
    """One node of the semantic graph."""

    id: str
    type: ThingType
    literals: list[str]
    completed: bool = False
    completed_at: float | None = None
    event_start: float | None = None


@dataclass(frozen=True)
class Relation:
    source: str
    target: str
    label: str


@dataclass
class Graph:
    """Typed things plus undirected-for-queries relations.

    ``degree`` counts stored relation triples incident to a thing (once per
    triple); ``neighbors`` deduplicates to (other id, label) pairs.
    """

    things: dict[str, Thing] = field(default_factory=dict)
    _triples: set[tuple[str, str, str]] = field(default_factory=set)
    _adjacency: dict[str, set[tuple[str, str]]] = field(default_factory=dict)
    _degree: dict[str, int] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.things == other.things and self._triples == other._triples

    # --- mutation ---------------------------------------------------------

    def add_thing(
        self,
        label: str,
        type: ThingType,
        id: str | None = None,
        *,
        extra_literals: tuple[str, ...] = (),
        completed: bool = False,
        completed_at: float | None = None,
        event_start: float | None = None,
    ) -> str:
        """Add a thing and return its id.

        Generated ids are deterministic in insertion order. ``event_start``
        is required for calendar events and rejected for everything else.
        """
        if not label or not label.strip():
            raise InvalidThing("a thing needs at least one non-empty label")
        if id is None:
            id = self._generate_id(type)
        if id in self.things:
            raise DuplicateThing(f"thing id {id!r} already exists")
        if (event_start is not None) != (type is ThingType.CALENDAR_EVENT):
            raise InvalidThing(
                f"event_start must be set exactly for calendar events (thing {id!r})"
            )
        if (completed or completed_at is not None) and type not in COMPLETABLE_TYPES:
            raise InvalidThing(f"only tasks and calendar events can be completed (thing {id!r})")
        self.things[id] = Thing(
            id=id,
            type=type,
            literals=[label, *extra_literals],
            completed=completed,
            completed_at=completed_at,
            event_start=event_start,
        )
        self._adjacency[id] = set()
        self._degree[id] = 0
        return id

    def _generate_id(self, type: ThingType) -> str:
        n = len(self.things) + 1
        candidate = f"{type.value}-{n}"
        while candidate in self.things:
            n += 1
            candidate = f"{type.value}-{n}"
        return candidate

    def add_relation(self, source: str, target: str, label: str) -> Relation:
        """Add a relation; idempotent on exact (source, target, label) repeats."""
        for endpoint in (source, target):
            if endpoint not in self.things:
                raise UnknownThing(f"unknown thing {endpoint!r}")
        if source == target:
            raise InvalidRelation(f"self-loop on {source!r} not allowed")
        triple = (source, target, label)
        if triple in self._triples:
            return Relation(*triple)
        self._triples.add(triple)
        self._adjacency[source].add((target, label))
        self._adjacency[target].add((source, label))
        self._degree[source] += 1
        self._degree[target] += 1
        return Relation(*triple)

    # --- queries ----------------------------------------------------------

    def __contains__(self, id: str) -> bool:
        return id in self.things

    def thing(self, id: str) -> Thing:
        try:
            return self.things[id]
        except KeyError:
            raise UnknownThing(f"unknown thing {id!r}") from None

    def degree(self, id: str) -> int:
        self.thing(id)
        return self._degree[id]

    def neighbors(self, id: str) -> set[tuple[str, str]]:
        """All (neighbor id, relation label) pairs one hop away, any direction."""
        self.thing(id)
        return set(self._adjacency[id])

    def neighbor_ids(self, id: str) -> list[str]:
        """Distinct neighbor ids in sorted order (deterministic traversal)."""
        self.thing(id)
        return sorted({other for other, _ in self._adjacency[id]})

    def relations(self) -> set[Relation]:
        return {Relation(*t) for t in self._triples}

    def match_literal(self, keyword: str) -> set[str]:
        """Case-insensitive substring match over all literals of all things."""
        if not keyword:
            return set()
        needle = keyword.lower()
        return {
            t.id
            for t in self.things.values()
            if any(needle in lit.lower() for lit in t.literals)
        }

    def context_members(self, context: str) -> set[str]:
        """Things attached to a context via a memberOfContext relation."""
        thing = self.thing(context)
        if thing.type is not ThingType.CONTEXT:
            raise NotAContext(f"{context!r} has type {thing.type.value}, not context")
        return {
            other for other, label in self._adjacency[context] if label == MEMBER_OF_CONTEXT
        }

    def things_of_type(self, type: ThingType) -> list[str]:
        return sorted(t.id for t in self.things.values() if t.type is type)

    # --- snapshot format ----------------------------------------------------

    def to_obj(self) -> dict:
        """JSON-friendly snapshot: {"things": [...], "relations": [...]}."""
        things = []
        for id in sorted(self.things):
            t = self.things[id]
            row: dict = {"id": t.id, "type": t.type.value, "literals": list(t.literals)}
            if t.completed or t.completed_at is not None:
                row["completed"] = t.completed
                if t.completed_at is not None:
                    row["completed_at"] = format_timestamp(t.completed_at)
            if t.event_start is not None:
                row["event_start"] = format_timestamp(t.event_start)
            things.append(row)
        relations = [
            {"source": s, "target": t, "label": l} for s, t, l in sorted(self._triples)
        ]
        return {"things": things, "relations": relations}

    @classmethod
    def from_obj(cls, obj: dict) -> "Graph":
        """Build a graph from a snapshot object, validating every invariant."""
        if not isinstance(obj, dict):
            raise MalformedDocument("graph snapshot must be an object")
        things = obj.get("things")
        relations = obj.get("relations", [])
        if not isinstance(things, list) or not isinstance(relations, list):
            raise MalformedDocument("graph snapshot needs 'things' and 'relations' arrays")
        graph = cls()
        for row in things:
            if not isinstance(row, dict) or "id" not in row or "type" not in row:
                raise MalformedDocument(f"bad thing entry: {row!r}")
            try:
                type = ThingType(row["type"])
            except ValueError:
                raise MalformedDocument(f"unknown thing type {row['type']!r}") from None
            literals = row.get("literals")
            if not isinstance(literals, list) or not literals:
                raise MalformedDocument(f"thing {row['id']!r} needs a non-empty literals list")
            event_start = row.get("event_start")
            completed_at = row.get("completed_at")
            try:
                graph.add_thing(
                    str(literals[0]),
                    type,
                    id=str(row["id"]),
                    extra_literals=tuple(str(x) for x in literals[1:]),
                    completed=bool(row.get("completed", False)),
                    completed_at=parse_timestamp(completed_at) if completed_at is not None else None,
                    event_start=parse_timestamp(event_start) if event_start is not None else None,
                )
            except (DuplicateThing, InvalidThing) as exc:
                raise MalformedDocument(str(exc)) from exc
        for row in relations:
            if not isinstance(row, dict) or not {"source", "target", "label"} <= row.keys():
                raise MalformedDocument(f"bad relation entry: {row!r}")
            try:
                graph.add_relation(str(row["source"]), str(row["target"]), str(row["label"]))
            except (UnknownThing, InvalidRelation) as exc:
                raise MalformedDocument(str(exc)) from exc
        return graph
