"""The buoyancy engine: event application, spreading, context freezing.

State is organized as three disjoint record families:

* local  — (resource, user, context): value within one working context.
  Frozen whenever the context is not the user's active one, which preserves
  the context's internal ranking exactly until it is revisited.
* global — (resource, user): context-free value, always live.
* group  — (resource,): shared value fed by every user's interactions,
  decaying on a merged activity clock.

Mutation happens only while applying events (single logical writer); every
read is a pure function of (state, now) and safe to run concurrently.
"""

from __future__ import annotations

import json
import math

from .clock import ActivityClock
from .errors import (
    ClockRegression,
    InvalidEvent,
    InvalidWeight,
    NotAContext,
    SnapshotError,
    UnknownThing,
)
from .events import Event, EventKind, Scenario
from .graph import ATTENDEE, COMPLETABLE_TYPES, Graph, ThingType
from .params import DEFAULT_PARAMS, ParameterSet
from .records import BuoyancyRecord, peek, refresh, stimulate
from .timeutil import DAY, format_timestamp, parse_timestamp

SNAPSHOT_FORMAT = "membuoy-state@1"

LocalKey = tuple[str, str, str]
GlobalKey = tuple[str, str]


class Engine:
    """Applies a time-ordered event stream and answers buoyancy queries."""

    def __init__(self, graph: Graph, params: ParameterSet | None = None):
        self.graph = graph
        self.params = params or DEFAULT_PARAMS
        self.params.validate()
        self.local: dict[LocalKey, BuoyancyRecord] = {}
        self.global_: dict[GlobalKey, BuoyancyRecord] = {}
        self.group: dict[str, BuoyancyRecord] = {}
        self.active_context: dict[str, str] = {}
        self.clocks: dict[str, ActivityClock] = {}
        self.group_clock = ActivityClock(self.params.idle_cap_s)
        self.frontier: float | None = None   # wall time of the last applied event
        self.rule_mark: float | None = None  # time rules fired up to here
        self._ticks = self._build_tick_schedule()

    # --- time rules --------------------------------------------------------

    def _build_tick_schedule(self) -> list[tuple[float, str]]:
        """Daily stimulation ticks inside the lead window of each calendar event.

        Ticks sit on the grid start - j * 1d for j = 0..floor(L / 1d), so an
        observer advancing through the window sees one tick per elapsed day,
        the last one at the event start itself.
        """
        ticks: list[tuple[float, str]] = []
        steps = int(math.floor(self.params.event_lead_s / DAY))
        for thing in self.graph.things.values():
            if thing.event_start is None:
                continue
            for j in range(steps + 1):
                t = thing.event_start - j * DAY
                if t >= thing.event_start - self.params.event_lead_s:
                    ticks.append((t, thing.id))
        ticks.sort()
        return ticks

    def fire_time_rules(self, upto: float) -> None:
        """Fire all rule ticks in (rule_mark, upto], catch-up complete.

        The first call only sets the watermark: ticks scheduled before the
        simulation started never fire.
        """
        if self.rule_mark is None:
            self.rule_mark = upto
            return
        if upto < self.rule_mark:
            raise ClockRegression(f"time rules already fired up to {self.rule_mark}")
        for t, event_id in self._ticks:
            if not (self.rule_mark < t <= upto):
                continue
            attendees = sorted(
                other for other, label in self.graph.neighbors(event_id) if label == ATTENDEE
            )
            self._system_stimulus(event_id, attendees, t)
            self._spread_system(event_id, attendees, t)
        self.rule_mark = upto

    def _system_stimulus(self, resource: str, attendees: list[str], t: float) -> None:
        w = self.params.system_weight
        self._stim_group(resource, w, t)
        for attendee in attendees:
            self._stim_global(resource, attendee, w, t)

    def _spread_system(self, source: str, attendees: list[str], t: float) -> None:
        """Spread a system stimulus; recipients are group + attendee-global records."""
        if self.params.system_weight == 0.0:
            return
        for neighbor, weight in self._spread_weights(source, self.params.system_weight):
            self._stim_group(neighbor, weight, t)
            for attendee in attendees:
                self._stim_global(neighbor, attendee, weight, t)

    # --- event application ---------------------------------------------------

    def apply_event(self, event: Event) -> None:
        """Advance clocks, fire due rules, then dispatch one event."""
        self._check_refs(event)
        if self.frontier is not None and event.t < self.frontier:
            raise ClockRegression(
                f"event at {format_timestamp(event.t)} precedes frontier "
                f"{format_timestamp(self.frontier)}"
            )
        self.fire_time_rules(event.t)
        self._user_clock(event.actor).observe(event.t)
        self.group_clock.observe(event.t)

        if event.kind is EventKind.CONTEXT_SWITCH:
            self.switch_context(event.actor, event.context, event.t)
        else:
            target = self.graph.thing(event.target)
            if event.kind is EventKind.COMPLETE and target.type not in COMPLETABLE_TYPES:
                raise InvalidEvent(
                    f"cannot complete {event.target!r} of type {target.type.value}"
                )
            weight = self.params.weight(event.kind.value)
            context = self.active_context.get(event.actor)
            self._stim_all_families(event.target, event.actor, context, weight, event.t)
            if weight > 0.0:
                self.spread(event.target, weight, event.actor, context, event.t)
            if event.kind is EventKind.COMPLETE:
                # Flag set after the stimulation: the decay span leading up to
                # the completion is charged at the normal exponent.
                target.completed = True
                target.completed_at = event.t
        self.frontier = event.t

    def apply_all(self, events: list[Event]) -> None:
        for event in events:
            self.apply_event(event)

    def run_scenario(self, scenario: Scenario) -> None:
        """Apply all events, then fire rules due before the horizon."""
        self.apply_all(scenario.events)
        self.fire_time_rules(scenario.horizon)

    def _check_refs(self, event: Event) -> None:
        for ref in (event.actor, event.target, event.context):
            if ref is not None and ref not in self.graph:
                raise UnknownThing(f"unknown thing {ref!r}")
        if event.kind is EventKind.CONTEXT_SWITCH:
            if event.context is None:
                raise InvalidEvent("context_switch requires a context")
        elif event.target is None:
            raise InvalidEvent(f"{event.kind.value} requires a target")

    # --- stimulation plumbing -------------------------------------------------

    def _user_clock(self, user: str) -> ActivityClock:
        clock = self.clocks.get(user)
        if clock is None:
            clock = ActivityClock(self.params.idle_cap_s)
            self.clocks[user] = clock
        return clock

    def _completed(self, resource: str) -> bool:
        return self.graph.things[resource].completed

    def _stim_global(self, resource: str, user: str, weight: float, t: float) -> None:
        key = (resource, user)
        record = self.global_.get(key)
        now = self._user_clock(user).project(t)
        if record is None:
            record = BuoyancyRecord(last_update=now)
        self.global_[key] = stimulate(
            record, self.params.row(self.graph.things[resource].type), self.params,
            weight, now, completed=self._completed(resource),
        )

    def _stim_group(self, resource: str, weight: float, t: float) -> None:
        record = self.group.get(resource)
        now = self.group_clock.project(t)
        if record is None:
            record = BuoyancyRecord(last_update=now)
        self.group[resource] = stimulate(
            record, self.params.row(self.graph.things[resource].type), self.params,
            weight, now, completed=self._completed(resource),
        )

    def _stim_local(self, resource: str, user: str, context: str, weight: float, t: float) -> None:
        key = (resource, user, context)
        record = self.local.get(key)
        now = self._user_clock(user).project(t)
        if record is None:
            record = BuoyancyRecord(last_update=now)
        self.local[key] = stimulate(
            record, self.params.row(self.graph.things[resource].type), self.params,
            weight, now, completed=self._completed(resource),
        )

    def _stim_all_families(
        self, resource: str, user: str, context: str | None, weight: float, t: float
    ) -> None:
        self._stim_global(resource, user, weight, t)
        self._stim_group(resource, weight, t)
        if context is not None:
            self._stim_local(resource, user, context, weight, t)

    # --- spreading activation --------------------------------------------------

    def _spread_weights(self, source: str, base_weight: float) -> list[tuple[str, float]]:
        """Breadth-first damped weights for every thing reached from source.

        A child's weight is w_parent * rho / (1 + log2(degree(parent))).
        Expansion stops below epsilon or beyond the depth limit; each thing is
        visited once, at its shallowest position (ties: lowest id first).
        """
        if source not in self.graph:
            raise UnknownThing(f"unknown thing {source!r}")
        if not (0.0 < base_weight <= 1.0):
            raise InvalidWeight(f"spread base weight {base_weight} outside (0, 1]")
        reached: list[tuple[str, float]] = []
        visited = {source}
        frontier: list[tuple[str, float]] = [(source, base_weight)]
        for _hop in range(self.params.spread_depth):
            next_frontier: list[tuple[str, float]] = []
            for parent, parent_weight in frontier:
                degree = self.graph.degree(parent)
                if degree == 0:
                    continue
                child_weight = parent_weight * self.params.spread_rho / (1.0 + math.log2(degree))
                if child_weight < self.params.spread_epsilon:
                    continue
                for neighbor in self.graph.neighbor_ids(parent):
                    if neighbor in visited:
                        continue
                    visited.add(neighbor)
                    reached.append((neighbor, child_weight))
                    next_frontier.append((neighbor, child_weight))
            frontier = next_frontier
        return reached

    def spread(
        self, source: str, base_weight: float, user: str, context: str | None, t: float
    ) -> None:
        """Propagate a stimulation from source into its graph neighborhood."""
        for neighbor, weight in self._spread_weights(source, base_weight):
            self._stim_all_families(neighbor, user, context, weight, t)

    # --- context switching -------------------------------------------------------

    def switch_context(self, user: str, context: str, t: float) -> None:
        """Freeze the departed context's local records, thaw the entered one's.

        Frozen records keep the exact value they had at departure; on revisit
        their update time is rebased so the frozen interval costs no decay.
        Both context things get a system stimulus on the user's global record.
        """
        thing = self.graph.thing(context)
        if thing.type is not ThingType.CONTEXT:
            raise NotAContext(f"{context!r} has type {thing.type.value}, not context")
        previous = self.active_context.get(user)
        if previous == context:
            self._stim_global(context, user, self.params.system_weight, t)
            return
        now = self._user_clock(user).project(t)
        if previous is not None:
            for key, record in self.local.items():
                if key[1] == user and key[2] == previous:
                    settled = refresh(
                        record, self.params.row(self.graph.things[key[0]].type), self.params,
                        now, completed=self._completed(key[0]),
                    )
                    settled.frozen = True
                    settled.frozen_at = now
                    self.local[key] = settled
        for key, record in self.local.items():
            if key[1] == user and key[2] == context and record.frozen:
                thawed = record.copy()
                thawed.frozen = False
                thawed.frozen_at = None
                thawed.last_update = now
                self.local[key] = thawed
        self.active_context[user] = context
        if previous is not None:
            self._stim_global(previous, user, self.params.system_weight, t)
        self._stim_global(context, user, self.params.system_weight, t)

    # --- reads -----------------------------------------------------------------

    def resolve_query_time(self, now: float | None) -> float:
        if now is not None:
            return now
        if self.frontier is None:
            raise ClockRegression("no events applied yet and no explicit query time given")
        return max(self.frontier, self.rule_mark or self.frontier)

    def local_mb(self, resource: str, user: str, context: str, now: float | None = None) -> float:
        """Context-scoped value; frozen contexts report their frozen value."""
        for ref in (resource, user, context):
            self.graph.thing(ref)
        record = self.local.get((resource, user, context))
        if record is None:
            return 0.0
        if record.frozen:
            return record.base
        t = self.resolve_query_time(now)
        return peek(
            record, self.params.row(self.graph.things[resource].type), self.params,
            self._user_clock(user).project(t), completed=self._completed(resource),
        )

    def global_mb(self, resource: str, user: str, now: float | None = None) -> float:
        """Context-free value of a resource for one user."""
        for ref in (resource, user):
            self.graph.thing(ref)
        record = self.global_.get((resource, user))
        if record is None:
            return 0.0
        t = self.resolve_query_time(now)
        return peek(
            record, self.params.row(self.graph.things[resource].type), self.params,
            self._user_clock(user).project(t), completed=self._completed(resource),
        )

    def group_mb(self, resource: str, now: float | None = None) -> float:
        """Shared value of a resource across all users."""
        self.graph.thing(resource)
        record = self.group.get(resource)
        if record is None:
            return 0.0
        t = self.resolve_query_time(now)
        return peek(
            record, self.params.row(self.graph.things[resource].type), self.params,
            self.group_clock.project(t), completed=self._completed(resource),
        )

    def activity_elapsed(self, user: str, t0: float, t1: float) -> float:
        """Activity time a user accumulated between two wall instants."""
        return self._user_clock(user).elapsed(t0, t1)

    # --- persistence --------------------------------------------------------------

    def snapshot(self) -> dict:
        """Full engine state as a JSON-friendly object (round-trip stable)."""

        def dump_record(record: BuoyancyRecord) -> dict:
            obj: dict = {
                "base": record.base,
                "last_update": record.last_update,
                "stim_history": list(record.stim_history),
            }
            if record.frozen:
                obj["frozen"] = True
                obj["frozen_at"] = record.frozen_at
            return obj

        return {
            "format": SNAPSHOT_FORMAT,
            "frontier": format_timestamp(self.frontier) if self.frontier is not None else None,
            "rule_mark": format_timestamp(self.rule_mark) if self.rule_mark is not None else None,
            "graph": self.graph.to_obj(),
            "params": self.params.to_obj(),
            "active_contexts": {u: c for u, c in sorted(self.active_context.items())},
            "clocks": {
                "users": {u: self.clocks[u].to_obj() for u in sorted(self.clocks)},
                "group": self.group_clock.to_obj(),
            },
            "local": [
                {"resource": r, "user": u, "context": c, **dump_record(rec)}
                for (r, u, c), rec in sorted(self.local.items())
            ],
            "global": [
                {"resource": r, "user": u, **dump_record(rec)}
                for (r, u), rec in sorted(self.global_.items())
            ],
            "group": [
                {"resource": r, **dump_record(rec)} for r, rec in sorted(self.group.items())
            ],
        }

    def snapshot_json(self) -> str:
        return json.dumps(self.snapshot(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_snapshot(cls, obj: dict) -> "Engine":
        """Rebuild an engine from a snapshot; names the missing section on error."""
        if not isinstance(obj, dict):
            raise SnapshotError("state snapshot must be an object")
        if obj.get("format") != SNAPSHOT_FORMAT:
            raise SnapshotError(f"missing or unsupported 'format' (expected {SNAPSHOT_FORMAT})")
        for section in ("graph", "params", "active_contexts", "clocks", "local", "global", "group"):
            if section not in obj:
                raise SnapshotError(f"snapshot missing section {section!r}")
        try:
            graph = Graph.from_obj(obj["graph"])
            params = ParameterSet.from_obj(obj["params"])
        except Exception as exc:
            raise SnapshotError(f"bad snapshot payload: {exc}") from exc
        engine = cls(graph, params)

        def load_record(row: dict) -> BuoyancyRecord:
            try:
                return BuoyancyRecord(
                    base=float(row["base"]),
                    last_update=float(row["last_update"]),
                    stim_history=[float(x) for x in row["stim_history"]],
                    frozen=bool(row.get("frozen", False)),
                    frozen_at=float(row["frozen_at"]) if row.get("frozen_at") is not None else None,
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise SnapshotError(f"bad record entry {row!r}: {exc}") from exc

        def resolve(row: dict, *keys: str) -> tuple:
            ids = tuple(row[k] for k in keys)
            for id in ids:
                if id not in graph:
                    raise SnapshotError(f"record references unknown thing {id!r}")
            return ids

        try:
            for row in obj["local"]:
                engine.local[resolve(row, "resource", "user", "context")] = load_record(row)
            for row in obj["global"]:
                engine.global_[resolve(row, "resource", "user")] = load_record(row)
            for row in obj["group"]:
                engine.group[resolve(row, "resource")[0]] = load_record(row)
        except (KeyError, TypeError) as exc:
            raise SnapshotError(f"bad record section: {exc}") from exc
        clocks = obj["clocks"]
        if not isinstance(clocks, dict) or "users" not in clocks or "group" not in clocks:
            raise SnapshotError("snapshot clocks need 'users' and 'group'")
        for user, clock_obj in clocks["users"].items():
            engine.clocks[user] = ActivityClock.from_obj(clock_obj, params.idle_cap_s)
        engine.group_clock = ActivityClock.from_obj(clocks["group"], params.idle_cap_s)
        engine.active_context = dict(obj["active_contexts"])
        engine.frontier = (
            parse_timestamp(obj["frontier"]) if obj.get("frontier") is not None else None
        )
        engine.rule_mark = (
            parse_timestamp(obj["rule_mark"]) if obj.get("rule_mark") is not None else None
        )
        return engine
