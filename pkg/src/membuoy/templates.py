"""Deterministic scenario generators for typical knowledge-work situations.

Each template is a pure function of (seed, params): generating twice with the
same arguments yields byte-identical scenario documents. The bundled corpus
under scenarios/ is exactly these five templates rendered with seed 1.
"""

from __future__ import annotations

import random

from .errors import BadParam, UnknownTemplate
from .events import Event, EventKind, Scenario
from .graph import ATTENDEE, MEMBER_OF_CONTEXT, Graph, ThingType
from .timeutil import DAY, HOUR, MINUTE, parse_timestamp

# Monday morning, the week the Rome trip was planned.
BASE_T = parse_timestamp("2018-07-02T09:00:00Z")


def _int_param(params: dict, key: str, default: int, low: int, high: int) -> int:
    value = params.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadParam(f"parameter {key!r} must be an integer")
    if not (low <= value <= high):
        raise BadParam(f"parameter {key!r} must be in [{low}, {high}]")
    return value


def _check_keys(params: dict, allowed: set[str]) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise BadParam(f"unknown template parameters: {sorted(unknown)}")


def _solo_task(seed: int, params: dict) -> Scenario:
    """One user modifying one task every day."""
    _check_keys(params, {"days"})
    days = _int_param(params, "days", 10, 1, 365)
    graph = Graph()
    user = graph.add_thing("Solo Worker", ThingType.USER, "user1")
    task = graph.add_thing("Quarterly report", ThingType.TASK, "task1")
    graph.add_relation(task, user, "assignedTo")
    events = [
        Event(t=BASE_T + day * DAY, actor=user, kind=EventKind.MODIFY, target=task)
        for day in range(days)
    ]
    return Scenario(
        name="solo-task", graph=graph, events=events, horizon=events[-1].t + DAY
    )


def _group_task_graph(members: int, readers: int = 0) -> tuple[Graph, list[str], list[str], str, str, str]:
    graph = Graph()
    actives = [
        graph.add_thing(f"Member {i + 1}", ThingType.USER, f"user{i + 1}")
        for i in range(members)
    ]
    reader_ids = [
        graph.add_thing(f"Reader {i + 1}", ThingType.USER, f"reader{i + 1}")
        for i in range(readers)
    ]
    context = graph.add_thing("Release planning", ThingType.CONTEXT, "ctx-release")
    task = graph.add_thing("Ship the release", ThingType.TASK, "task-release")
    doc = graph.add_thing("Release checklist", ThingType.DOCUMENT, "doc-checklist")
    graph.add_relation(task, context, MEMBER_OF_CONTEXT)
    graph.add_relation(doc, context, MEMBER_OF_CONTEXT)
    graph.add_relation(doc, task, "attachedTo")
    for u in actives + reader_ids:
        graph.add_relation(task, u, "assignedTo")
    return graph, actives, reader_ids, context, task, doc


def _group_task(
    seed: int, params: dict, with_readers: bool = False, name: str = "group-task"
) -> Scenario:
    """Several users collaborating on a task; optional read-only members."""
    _check_keys(params, {"days", "members"} | ({"readers"} if with_readers else set()))
    days = _int_param(params, "days", 10, 1, 365)
    members = _int_param(params, "members", 3, 1, 20)
    readers = _int_param(params, "readers", 2, 1, 20) if with_readers else 0
    rng = random.Random(seed)
    graph, actives, reader_ids, context, task, doc = _group_task_graph(members, readers)
    events: list[Event] = []
    for u in actives + reader_ids:
        events.append(Event(t=BASE_T, actor=u, kind=EventKind.CONTEXT_SWITCH, context=context))
    for day in range(days):
        day_start = BASE_T + day * DAY + HOUR
        for i, u in enumerate(actives):
            kind = rng.choice([EventKind.VIEW, EventKind.MODIFY, EventKind.ANNOTATE])
            target = rng.choice([task, doc])
            offset = i * HOUR + rng.randrange(0, 50) * MINUTE
            events.append(Event(t=day_start + offset, actor=u, kind=kind, target=target))
        for i, u in enumerate(reader_ids):
            # Readers only look, and only every other day.
            if day % 2 == 0:
                offset = (len(actives) + i) * HOUR + rng.randrange(0, 50) * MINUTE
                events.append(Event(t=day_start + offset, actor=u, kind=EventKind.VIEW, target=task))
    events.append(
        Event(t=BASE_T + days * DAY, actor=actives[0], kind=EventKind.COMPLETE, target=task)
    )
    events.sort(key=lambda e: e.t)
    return Scenario(name=name, graph=graph, events=events, horizon=events[-1].t + DAY)


def _group_task_readers(seed: int, params: dict) -> Scenario:
    return _group_task(seed, params, with_readers=True, name="group-task-readers")


def _before_after_event(seed: int, params: dict) -> Scenario:
    """Activity around a scheduled meeting; exercises the upcoming-event rule."""
    _check_keys(params, {"attendees"})
    attendees = _int_param(params, "attendees", 2, 1, 10)
    rng = random.Random(seed)
    graph = Graph()
    users = [
        graph.add_thing(f"Attendee {i + 1}", ThingType.USER, f"user{i + 1}")
        for i in range(attendees)
    ]
    meeting_start = BASE_T + 6 * DAY + HOUR
    meeting = graph.add_thing(
        "Project kickoff meeting", ThingType.CALENDAR_EVENT, "meeting-kickoff",
        event_start=meeting_start,
    )
    agenda = graph.add_thing("Kickoff agenda", ThingType.DOCUMENT, "doc-agenda")
    slides = graph.add_thing("Kickoff slides", ThingType.PRESENTATION, "slides-kickoff")
    graph.add_relation(agenda, meeting, "attachedTo")
    graph.add_relation(slides, meeting, "attachedTo")
    for u in users:
        graph.add_relation(meeting, u, ATTENDEE)
    events: list[Event] = [
        Event(t=BASE_T, actor=users[0], kind=EventKind.CREATE, target=agenda)
    ]
    for day in range(1, 6):
        u = users[day % attendees]
        events.append(
            Event(
                t=BASE_T + day * DAY + rng.randrange(0, 4) * HOUR,
                actor=u, kind=EventKind.VIEW, target=agenda,
            )
        )
    for i, u in enumerate(users):
        events.append(
            Event(t=meeting_start + i * MINUTE, actor=u, kind=EventKind.VIEW, target=meeting)
        )
    events.append(
        Event(t=meeting_start + 2 * HOUR, actor=users[0], kind=EventKind.COMPLETE, target=meeting)
    )
    for day in (1, 2):
        events.append(
            Event(
                t=meeting_start + day * DAY + rng.randrange(0, 4) * HOUR,
                actor=users[0], kind=EventKind.VIEW, target=slides,
            )
        )
    events.sort(key=lambda e: e.t)
    return Scenario(
        name="before-after-event", graph=graph, events=events, horizon=events[-1].t + DAY
    )


def _rome_trip(seed: int, params: dict) -> Scenario:
    """Two contexts sharing things, a long detour, and a revisit.

    The owner plans a trip to Rome, switches to preparing an unrelated meeting
    in Mannheim that happens to involve the same person, city and railway
    site, works there for 30 days, then returns to the trip context.
    """
    _check_keys(params, {"detour_days"})
    detour_days = _int_param(params, "detour_days", 30, 1, 365)
    rng = random.Random(seed)
    graph = Graph()
    user1 = graph.add_thing("User1", ThingType.USER, "user1")
    user2 = graph.add_thing("User2", ThingType.USER, "user2")
    rome = graph.add_thing("Trip to Rome in July 2018", ThingType.CONTEXT, "ctx-rome")
    mannheim_ctx = graph.add_thing("Mannheim meeting", ThingType.CONTEXT, "ctx-mannheim")
    peter = graph.add_thing("Peter Stainer", ThingType.PERSON, "peter-stainer")
    mannheim = graph.add_thing("Mannheim", ThingType.TOPIC, "mannheim")
    bahn = graph.add_thing("Deutsche Bahn", ThingType.WEB_PAGE, "deutsche-bahn")
    email_q = graph.add_thing("Email: Which hotel should we take?", ThingType.EMAIL, "email-hotel-q")
    email_a = graph.add_thing("Re: Which hotel should we take?", ThingType.EMAIL, "email-hotel-a")
    hotel_a = graph.add_thing("Hotel Roma Centrale", ThingType.WEB_PAGE, "hotel-roma")
    hotel_b = graph.add_thing("Hotel Colosseo", ThingType.WEB_PAGE, "hotel-colosseo")
    tickets = graph.add_thing("Book train tickets to Rome", ThingType.TASK, "task-tickets")
    meeting_start = BASE_T + (8 + detour_days - 2) * DAY + HOUR
    meeting = graph.add_thing(
        "Meeting in Mannheim", ThingType.CALENDAR_EVENT, "meeting-mannheim",
        event_start=meeting_start,
    )
    agenda = graph.add_thing("Mannheim meeting agenda", ThingType.DOCUMENT, "doc-agenda")

    for member in (peter, mannheim, bahn, email_q, email_a, hotel_a, hotel_b, tickets):
        graph.add_relation(member, rome, MEMBER_OF_CONTEXT)
    for member in (peter, mannheim, bahn, meeting, agenda):
        graph.add_relation(member, mannheim_ctx, MEMBER_OF_CONTEXT)
    graph.add_relation(email_a, email_q, "inReplyTo")
    graph.add_relation(tickets, user1, "assignedTo")
    graph.add_relation(agenda, meeting, "attachedTo")
    for u in (user1, user2, peter):
        graph.add_relation(meeting, u, ATTENDEE)

    e: list[Event] = []

    def at(day: float, hour: float) -> float:
        return BASE_T + day * DAY + hour * HOUR

    # Phase 1: planning the trip (the context's golden thread).
    e.append(Event(t=at(0, 0), actor=user1, kind=EventKind.CONTEXT_SWITCH, context=rome))
    e.append(Event(t=at(0, 0.25), actor=user1, kind=EventKind.VIEW, target=peter))
    e.append(Event(t=at(0, 0.5), actor=user1, kind=EventKind.CREATE, target=email_q))
    e.append(Event(t=at(1, 0.5), actor=user1, kind=EventKind.VIEW, target=email_a))
    e.append(Event(t=at(1, 1.0), actor=user1, kind=EventKind.ANNOTATE, target=email_a))
    e.append(Event(t=at(2, 0.0), actor=user1, kind=EventKind.VIEW, target=bahn))
    e.append(Event(t=at(2, 2.0), actor=user1, kind=EventKind.MODIFY, target=tickets))
    e.append(Event(t=at(3, 0.25), actor=user1, kind=EventKind.VIEW, target=hotel_a))
    e.append(Event(t=at(3, 1.25), actor=user1, kind=EventKind.VIEW, target=hotel_b))
    e.append(Event(t=at(4, 0.5), actor=user1, kind=EventKind.VIEW, target=hotel_a))
    e.append(Event(t=at(4, 0.75), actor=user1, kind=EventKind.ANNOTATE, target=hotel_a))
    e.append(Event(t=at(5, 0.0), actor=user1, kind=EventKind.VIEW, target=mannheim))
    e.append(Event(t=at(6, 0.0), actor=user1, kind=EventKind.COMPLETE, target=tickets))
    e.append(Event(t=at(7, 0.0), actor=user1, kind=EventKind.VIEW, target=bahn))

    # Phase 2: the Mannheim detour; shared things get stimulated, the trip
    # context stays frozen for user1.
    switch_day = 8
    e.append(Event(t=at(switch_day, 0), actor=user1, kind=EventKind.CONTEXT_SWITCH, context=mannheim_ctx))
    e.append(Event(t=at(switch_day, 0.5), actor=user2, kind=EventKind.CONTEXT_SWITCH, context=mannheim_ctx))
    mannheim_things = [agenda, bahn, peter, mannheim, meeting]
    for day in range(switch_day, switch_day + detour_days):
        for user, hour in ((user1, 1.0), (user2, 5.0)):
            target = rng.choice(mannheim_things)
            kind = rng.choice([EventKind.VIEW, EventKind.MODIFY])
            e.append(Event(t=at(day, hour + rng.randrange(0, 50) / 60), actor=user, kind=kind, target=target))

    # Phase 3: revisiting the trip.
    return_day = switch_day + detour_days
    e.append(Event(t=at(return_day, 0), actor=user1, kind=EventKind.CONTEXT_SWITCH, context=rome))
    e.append(Event(t=at(return_day, 1.0), actor=user1, kind=EventKind.VIEW, target=hotel_a))
    e.sort(key=lambda ev: ev.t)
    return Scenario(name="rome-trip", graph=graph, events=e, horizon=e[-1].t + DAY)


TEMPLATES = {
    "solo-task": _solo_task,
    "group-task": lambda seed, params: _group_task(seed, params),
    "group-task-readers": _group_task_readers,
    "before-after-event": _before_after_event,
    "rome-trip": _rome_trip,
}


def generate_scenario(template: str, seed: int, params: dict | None = None) -> Scenario:
    """Build the named template deterministically from (seed, params)."""
    builder = TEMPLATES.get(template)
    if builder is None:
        raise UnknownTemplate(
            f"unknown template {template!r}; available: {sorted(TEMPLATES)}"
        )
    return builder(seed, dict(params or {}))
