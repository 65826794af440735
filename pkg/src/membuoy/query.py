"""Forgetful queries: threshold-hiding search, context listings, timelines.

Hiding is temporal, not destructive — items below the threshold stay in the
graph and reappear once restimulated or once the slider drops. Every result
carries a coverage statistic so callers can tell how much of the matching
information is currently visible.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .engine import Engine
from .errors import InvalidInterval, InvalidThreshold
from .events import Scenario
from .graph import ThingType
from .params import ParameterSet
from .timeutil import format_timestamp


@dataclass
class SearchResult:
    hits: list[tuple[str, float]]   # (thing id, mb), descending mb, ties by id
    coverage: float
    hidden_count: int


def forgetful_search(
    engine: Engine, keyword: str, threshold: float, user: str, now: float | None = None
) -> SearchResult:
    """Literal-match search filtered by the user's global buoyancy.

    Coverage is |hits| / |matches|; an empty candidate set counts as fully
    covered (nothing was hidden).
    """
    if not (0.0 <= threshold <= 1.0):
        raise InvalidThreshold(f"threshold {threshold} outside [0, 1]")
    candidates = engine.graph.match_literal(keyword)
    scored = [(id, engine.global_mb(id, user, now)) for id in sorted(candidates)]
    hits = [(id, mb) for id, mb in scored if mb >= threshold]
    hits.sort(key=lambda pair: (-pair[1], pair[0]))
    hidden = len(scored) - len(hits)
    coverage = 1.0 if not scored else len(hits) / len(scored)
    return SearchResult(hits=hits, coverage=coverage, hidden_count=hidden)


def context_listing(
    engine: Engine, context: str, user: str, now: float | None = None
) -> list[tuple[str, float]]:
    """Context members ordered by descending local buoyancy (ties by id).

    For an inactive context the local records are frozen, so the listing —
    the context's golden thread — is identical at every query time.
    """
    members = engine.graph.context_members(context)
    ranked = [(id, engine.local_mb(id, user, context, now)) for id in sorted(members)]
    ranked.sort(key=lambda pair: (-pair[1], pair[0]))
    return ranked


def mb_report(engine: Engine, resource: str, now: float | None = None) -> dict:
    """Cross-section of all record families for one resource.

    Enumerates every user and every (user, context) pair in the graph;
    absent records report 0.0, mirroring the "not relevant here" reading.
    """
    engine.graph.thing(resource)
    users = engine.graph.things_of_type(ThingType.USER)
    contexts = engine.graph.things_of_type(ThingType.CONTEXT)
    return {
        "group": engine.group_mb(resource, now),
        "global": {u: engine.global_mb(resource, u, now) for u in users},
        "local": {
            u: {c: engine.local_mb(resource, u, c, now) for c in contexts} for u in users
        },
    }


def timeline(
    scenario: Scenario,
    resource: str,
    user: str,
    step: float,
    t_start: float | None = None,
    t_end: float | None = None,
    params: ParameterSet | None = None,
) -> list[tuple[float, float]]:
    """Replay a scenario, sampling the resource's global MB on a fixed grid.

    Events and due rules up to each sample instant are applied first, so a
    sample taken exactly at an event time shows the post-event value.
    """
    if step <= 0:
        raise InvalidInterval(f"step must be positive, got {step}")
    start = t_start if t_start is not None else (
        scenario.events[0].t if scenario.events else scenario.horizon
    )
    end = t_end if t_end is not None else scenario.horizon
    if start > end:
        raise InvalidInterval(f"window start {start} after end {end}")
    engine = Engine(scenario.graph, params)
    engine.graph.thing(resource)
    engine.graph.thing(user)
    samples = int(math.floor((end - start) / step)) + 1
    series: list[tuple[float, float]] = []
    cursor = 0
    for i in range(samples):
        at = start + i * step
        while cursor < len(scenario.events) and scenario.events[cursor].t <= at:
            engine.apply_event(scenario.events[cursor])
            cursor += 1
        if engine.frontier is not None:
            engine.fire_time_rules(at)
            series.append((at, engine.global_mb(resource, user, at)))
        else:
            series.append((at, 0.0))
    return series


def timeline_csv(series: list[tuple[float, float]]) -> str:
    """Render a timeline as CSV: header ``timestamp,mb``, six decimals."""
    out = io.StringIO()
    out.write("timestamp,mb\n")
    for t, mb in series:
        out.write(f"{format_timestamp(t)},{mb:.6f}\n")
    return out.getvalue()


def search_csv(result: SearchResult) -> str:
    """Render a search result as CSV with a trailing coverage comment."""
    out = io.StringIO()
    out.write("rank,id,mb\n")
    for rank, (id, mb) in enumerate(result.hits, start=1):
        out.write(f"{rank},{id},{mb:.6f}\n")
    out.write(f"# coverage={result.coverage:.6f} hidden={result.hidden_count}\n")
    return out.getvalue()
