"""Exception taxonomy for the membuoy package.

Every error carries a ``category`` used by the service layer (HTTP status)
and the CLI (exit code) to classify failures without string matching.
"""

from __future__ import annotations


class MBError(Exception):
    """Base class for all membuoy errors."""

    category = "internal"


# --- graph ---------------------------------------------------------------

class GraphError(MBError):
    category = "graph"


class DuplicateThing(GraphError):
    """A thing id was added twice."""


class UnknownThing(GraphError):
    """A referenced thing id does not exist in the graph."""


class InvalidThing(GraphError):
    """Thing violates a structural invariant (empty label, bad metadata)."""


class InvalidRelation(GraphError):
    """Relation violates a structural invariant (e.g. self-loop)."""


class NotAContext(GraphError):
    """A context-typed thing was required but the id has another type."""


# --- scenarios -----------------------------------------------------------

class ScenarioError(MBError):
    category = "scenario"


class MalformedDocument(ScenarioError):
    """Scenario or graph document is structurally invalid."""


class UnknownReference(ScenarioError):
    """An event references an id missing from the scenario graph."""

    def __init__(self, index: int, missing_id: str):
        super().__init__(f"event[{index}] references unknown id {missing_id!r}")
        self.index = index
        self.missing_id = missing_id


class UnsortedEvents(ScenarioError):
    """Events are not sorted by timestamp."""

    def __init__(self, index: int):
        super().__init__(f"event[{index}] is earlier than its predecessor")
        self.index = index


class UnknownTemplate(ScenarioError):
    """Requested scenario template does not exist."""


class BadParam(ScenarioError):
    """A template or configuration parameter is unknown or out of range."""


# --- engine --------------------------------------------------------------

class EngineError(MBError):
    category = "engine"


class InvalidDuration(EngineError):
    """Negative elapsed time passed to a decay computation."""


class InvalidInterval(EngineError):
    """Interval with start after end."""


class ClockRegression(EngineError):
    """An operation tried to move a clock or record backwards in time."""


class FrozenRecord(EngineError):
    """A frozen local record cannot be refreshed or stimulated."""


class InvalidWeight(EngineError):
    """Stimulation weight outside [0, 1]."""


class InvalidEvent(EngineError):
    """Event cannot be applied to its target (e.g. completing a person)."""


# --- queries -------------------------------------------------------------

class QueryError(MBError):
    category = "query"


class InvalidThreshold(QueryError):
    """Search threshold outside [0, 1]."""


# --- persistence ---------------------------------------------------------

class SnapshotError(MBError):
    """Engine state snapshot is missing sections or malformed."""

    category = "snapshot"
