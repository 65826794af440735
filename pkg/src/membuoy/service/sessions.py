"""In-memory session registry for the service.

A session pairs a live engine with (usually) a parsed scenario. Event
application is serialized per session (single writer); reads never mutate
engine state, so queries can run concurrently with each other.
"""

from __future__ import annotations

import threading

from ..engine import Engine
from ..errors import MBError, SnapshotError
from ..events import Scenario, parse_scenario
from ..harness import RunReport, run_scenario_report
from ..params import ParameterSet


class SessionNotFound(MBError):
    category = "session"


class SessionConflict(MBError):
    category = "session"


class Session:
    def __init__(self, name: str, scenario: Scenario | None, engine: Engine):
        self.name = name
        self.scenario = scenario
        self.engine = engine
        self.cursor = 0  # next scenario event to apply
        self.lock = threading.Lock()

    def info(self) -> dict:
        total = len(self.scenario.events) if self.scenario else 0
        return {
            "name": self.name,
            "scenario": self.scenario.name if self.scenario else None,
            "events_total": total,
            "events_applied": self.cursor,
            "complete": self.scenario is not None and self.cursor >= total,
            "active_contexts": dict(sorted(self.engine.active_context.items())),
        }

    def run(self, watch: list[str] | None, upto: int | None) -> RunReport:
        if self.scenario is None:
            raise SessionConflict(f"session {self.name!r} has no scenario to run")
        with self.lock:
            report = run_scenario_report(
                self.scenario, self.engine, watch=watch, start=self.cursor, upto=upto
            )
            self.cursor = report.applied
        return report

    def _check_snapshot_meta(self, snapshot: dict) -> int:
        applied = snapshot.get("applied_events", 0)
        if isinstance(applied, bool) or not isinstance(applied, int) or applied < 0:
            raise SnapshotError("applied_events must be a non-negative integer")
        if self.scenario is not None:
            snap_name = snapshot.get("scenario_name")
            if snap_name is not None and snap_name != self.scenario.name:
                raise SessionConflict(
                    f"snapshot was taken from scenario {snap_name!r}, "
                    f"session runs {self.scenario.name!r}"
                )
            if applied > len(self.scenario.events):
                raise SnapshotError("snapshot applied_events exceeds scenario event count")
        return applied

    def restore(self, snapshot: dict) -> None:
        engine = Engine.from_snapshot(snapshot)
        applied = self._check_snapshot_meta(snapshot)
        with self.lock:
            self.engine = engine
            self.cursor = applied

    def export(self) -> dict:
        with self.lock:
            snapshot = self.engine.snapshot()
            snapshot["applied_events"] = self.cursor
            if self.scenario is not None:
                snapshot["scenario_name"] = self.scenario.name
        return snapshot


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(
        self,
        scenario_doc: dict | None,
        params_doc: dict | None = None,
        name: str | None = None,
        snapshot: dict | None = None,
        replace: bool = False,
    ) -> Session:
        if scenario_doc is None and snapshot is None:
            raise SessionConflict("a session needs a scenario, a snapshot, or both")
        scenario = parse_scenario(scenario_doc) if scenario_doc is not None else None
        params = ParameterSet.from_obj(params_doc) if params_doc is not None else None
        if snapshot is not None:
            engine = Engine.from_snapshot(snapshot)
        else:
            engine = Engine(scenario.graph, params)
        session_name = name
        with self._lock:
            if session_name is None:
                self._counter += 1
                session_name = f"session-{self._counter}"
            if session_name in self._sessions and not replace:
                raise SessionConflict(f"session {session_name!r} already exists")
            session = Session(session_name, scenario, engine)
            if snapshot is not None:
                session.cursor = session._check_snapshot_meta(snapshot)
            self._sessions[session_name] = session
        return session

    def get(self, name: str) -> Session:
        session = self._sessions.get(name)
        if session is None:
            raise SessionNotFound(f"no session named {name!r}")
        return session

    def delete(self, name: str) -> None:
        with self._lock:
            if name not in self._sessions:
                raise SessionNotFound(f"no session named {name!r}")
            del self._sessions[name]

    def names(self) -> list[str]:
        return sorted(self._sessions)
