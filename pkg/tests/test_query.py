from __future__ import annotations

import pytest

from membuoy import Engine, Event, EventKind, Graph, ThingType, parse_scenario
from membuoy.errors import InvalidInterval, InvalidThreshold, NotAContext, UnknownThing
from membuoy.query import (
    context_listing,
    forgetful_search,
    mb_report,
    search_csv,
    timeline,
    timeline_csv,
)
from membuoy.timeutil import DAY, HOUR, format_timestamp

import oracles

T0 = 1_600_000_000.0


@pytest.fixture()
def search_engine() -> Engine:
    g = Graph()
    g.add_thing("Searcher", ThingType.USER, "u1")
    for i in range(10):
        g.add_thing(f"note about alpha {i}", ThingType.DOCUMENT, f"n{i}")
    engine = Engine(g)
    # touch notes a different number of times so their MBs spread out
    t = T0
    for i in range(10):
        for _ in range(i):
            engine.apply_event(Event(t=t, actor="u1", kind=EventKind.VIEW, target=f"n{i}"))
            t += HOUR
    return engine


def test_search_threshold_and_coverage(search_engine):
    now = search_engine.frontier
    result = forgetful_search(search_engine, "alpha", 0.5, "u1", now)
    matches = [(f"n{i}", search_engine.global_mb(f"n{i}", "u1", now)) for i in range(10)]
    hits, coverage, hidden = oracles.coverage_recount(matches, 0.5)
    assert result.hits == hits
    assert result.coverage == coverage
    assert result.hidden_count == hidden
    assert all(mb >= 0.5 for _, mb in result.hits)
    assert result.coverage == len(result.hits) / 10


def test_search_zero_threshold_shows_everything(search_engine):
    result = forgetful_search(search_engine, "alpha", 0.0, "u1", search_engine.frontier)
    assert len(result.hits) == 10
    assert result.coverage == 1.0
    assert result.hidden_count == 0
    # descending MB, ties by id
    mbs = [mb for _, mb in result.hits]
    assert mbs == sorted(mbs, reverse=True)


def test_search_no_matches_is_fully_covered(search_engine):
    result = forgetful_search(search_engine, "zzz", 0.4, "u1", search_engine.frontier)
    assert result.hits == []
    assert result.coverage == 1.0
    assert result.hidden_count == 0


def test_search_threshold_validated(search_engine):
    with pytest.raises(InvalidThreshold):
        forgetful_search(search_engine, "alpha", 1.5, "u1", search_engine.frontier)


def test_search_csv_format(search_engine):
    result = forgetful_search(search_engine, "alpha", 0.6, "u1", search_engine.frontier)
    text = search_csv(result)
    lines = text.strip().split("\n")
    assert lines[0] == "rank,id,mb"
    assert lines[-1] == f"# coverage={result.coverage:.6f} hidden={result.hidden_count}"
    assert len(lines) == len(result.hits) + 2


def test_context_listing_frozen_is_time_invariant(bundled_scenarios):
    scenario = parse_scenario(bundled_scenarios["rome-trip"].to_json())
    engine = Engine(scenario.graph)
    switch_back = max(
        i for i, e in enumerate(scenario.events)
        if e.kind is EventKind.CONTEXT_SWITCH and e.actor == "user1"
    )
    for event in scenario.events[:switch_back]:
        engine.apply_event(event)
    t = engine.frontier
    early = context_listing(engine, "ctx-rome", "user1", t)
    late = context_listing(engine, "ctx-rome", "user1", t + 30 * DAY)
    assert early == late
    assert len(early) == 8


def test_context_listing_active_rank_rises_after_view():
    g = Graph()
    g.add_thing("U", ThingType.USER, "u1")
    g.add_thing("Ctx", ThingType.CONTEXT, "ctx")
    for id in ("a", "b"):
        g.add_thing(id, ThingType.DOCUMENT, id)
        g.add_relation(id, "ctx", "memberOfContext")
    engine = Engine(g)
    engine.apply_event(Event(t=T0, actor="u1", kind=EventKind.CONTEXT_SWITCH, context="ctx"))
    engine.apply_event(Event(t=T0 + HOUR, actor="u1", kind=EventKind.VIEW, target="a"))
    engine.apply_event(Event(t=T0 + 2 * HOUR, actor="u1", kind=EventKind.VIEW, target="b"))
    engine.apply_event(Event(t=T0 + 3 * HOUR, actor="u1", kind=EventKind.VIEW, target="b"))
    listing = context_listing(engine, "ctx", "u1", engine.frontier)
    assert [id for id, _ in listing] == ["b", "a"]
    rank_a_before = [id for id, _ in listing].index("a")
    engine.apply_event(Event(t=T0 + 4 * HOUR, actor="u1", kind=EventKind.VIEW, target="a"))
    listing_after = context_listing(engine, "ctx", "u1", engine.frontier)
    assert [id for id, _ in listing_after].index("a") <= rank_a_before


def test_context_listing_errors(search_engine):
    with pytest.raises(NotAContext):
        context_listing(search_engine, "n1", "u1", search_engine.frontier)
    with pytest.raises(UnknownThing):
        context_listing(search_engine, "ghost", "u1", search_engine.frontier)


def test_empty_context_listing():
    g = Graph()
    g.add_thing("U", ThingType.USER, "u1")
    g.add_thing("Ctx", ThingType.CONTEXT, "ctx")
    engine = Engine(g)
    engine.apply_event(Event(t=T0, actor="u1", kind=EventKind.CONTEXT_SWITCH, context="ctx"))
    assert context_listing(engine, "ctx", "u1", T0) == []


def test_mb_report_cross_section(bundled_scenarios):
    scenario = parse_scenario(bundled_scenarios["rome-trip"].to_json())
    engine = Engine(scenario.graph)
    engine.run_scenario(scenario)
    report = mb_report(engine, "deutsche-bahn", scenario.horizon)
    assert set(report) == {"group", "global", "local"}
    assert set(report["global"]) == {"user1", "user2"}
    assert set(report["local"]["user1"]) == {"ctx-mannheim", "ctx-rome"}
    # user2 was never in the rome context: zero, not missing
    assert report["local"]["user2"]["ctx-rome"] == 0.0
    assert report["group"] > 0.0


def test_mb_report_fresh_thing_all_zeros():
    g = base = Graph()
    g.add_thing("U", ThingType.USER, "u1")
    g.add_thing("C", ThingType.CONTEXT, "c1")
    g.add_thing("X", ThingType.GENERIC, "x")
    engine = Engine(g)
    report = mb_report(engine, "x", T0)
    assert report["group"] == 0.0
    assert report["global"] == {"u1": 0.0}
    assert report["local"] == {"u1": {"c1": 0.0}}


def test_timeline_untouched_resource_is_flat_zero(bundled_scenarios):
    scenario = parse_scenario(bundled_scenarios["solo-task"].to_json())
    g = scenario.graph
    g.add_thing("Bystander", ThingType.DOCUMENT, "bystander")
    series = timeline(scenario, "bystander", "user1", step=DAY)
    assert all(mb == 0.0 for _, mb in series)


def test_timeline_rises_on_events_and_decays_between(bundled_scenarios):
    scenario = parse_scenario(bundled_scenarios["solo-task"].to_json())
    series = timeline(scenario, "task1", "user1", step=12 * HOUR)
    values = dict(series)
    first_event = scenario.events[0].t
    assert values[first_event] == pytest.approx(0.45)  # jump visible at the event sample
    assert values[first_event + 12 * HOUR] < values[first_event]  # decay between events
    assert values[scenario.events[-1].t] > 0.9


def test_timeline_sample_count_and_bounds():
    g = Graph()
    g.add_thing("U", ThingType.USER, "u1")
    g.add_thing("D", ThingType.DOCUMENT, "d")
    scenario = parse_scenario(
        {
            "name": "two-sample",
            "horizon": format_timestamp(T0 + 10 * DAY),
            "graph": g.to_obj(),
            "events": [
                {"t": format_timestamp(T0), "actor": "u1", "kind": "view", "target": "d"}
            ],
        }
    )
    series = timeline(scenario, "d", "u1", step=10 * DAY)
    assert len(series) == 2  # both endpoints
    assert series[0][0] == T0 and series[1][0] == T0 + 10 * DAY
    assert all(0.0 <= mb <= 1.0 for _, mb in series)
    with pytest.raises(InvalidInterval):
        timeline(scenario, "d", "u1", step=0.0)
    with pytest.raises(InvalidInterval):
        timeline(scenario, "d", "u1", step=DAY, t_start=T0 + DAY, t_end=T0)


def test_timeline_csv_format():
    series = [(T0, 0.35), (T0 + DAY, 0.3)]
    text = timeline_csv(series)
    lines = text.strip().split("\n")
    assert lines[0] == "timestamp,mb"
    assert lines[1] == f"{format_timestamp(T0)},0.350000"
    assert len(lines) == 3


def test_timeline_revisit_makes_curve_rise_again(bundled_scenarios):
    scenario = parse_scenario(bundled_scenarios["rome-trip"].to_json())
    revisit = scenario.events[-1]
    assert revisit.target == "hotel-roma"
    series = timeline(scenario, "hotel-roma", "user1", step=DAY)
    values = dict(series)
    first_after = min(t for t, _ in series if t >= revisit.t)
    last_before = max(t for t, _ in series if t < revisit.t)
    assert values[first_after] > values[last_before]


def test_equal_mb_ties_rank_by_id():
    g = Graph()
    g.add_thing("U", ThingType.USER, "u1")
    for id in ("b-item", "a-item", "c-item"):
        g.add_thing(f"shared {id}", ThingType.DOCUMENT, id)
    engine = Engine(g)
    engine.apply_event(Event(t=T0, actor="u1", kind=EventKind.VIEW, target="b-item"))
    result = forgetful_search(engine, "shared", 0.0, "u1", T0)
    assert [id for id, _ in result.hits] == ["b-item", "a-item", "c-item"]
    repeat = forgetful_search(engine, "shared", 0.0, "u1", T0)
    assert repeat.hits == result.hits
