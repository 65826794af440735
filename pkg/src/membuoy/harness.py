"""Scenario run reports: before/after tables per event, final cross-sections.

This is the experiment-app view of the engine: pick a scenario, watch a set
of things, and see every buoyancy value immediately before and after each
processed event, plus the full picture at the horizon.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .engine import Engine
from .events import Scenario
from .query import mb_report
from .timeutil import format_timestamp


@dataclass
class RunReport:
    scenario: str
    watch: list[str]
    rows: list[dict] = field(default_factory=list)
    final: dict | None = None
    applied: int = 0
    complete: bool = False

    def to_obj(self) -> dict:
        return {
            "scenario": self.scenario,
            "watch": list(self.watch),
            "rows": self.rows,
            "final": self.final,
            "applied": self.applied,
            "complete": self.complete,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), indent=2, sort_keys=True) + "\n"


def _tables(engine: Engine, watch: list[str], at: float) -> dict:
    return {id: mb_report(engine, id, at) for id in watch}


def run_scenario_report(
    scenario: Scenario,
    engine: Engine,
    watch: list[str] | None = None,
    start: int = 0,
    upto: int | None = None,
) -> RunReport:
    """Apply events [start, upto) through the engine, recording table pairs.

    ``watch`` defaults to every thing in the graph. When the run reaches the
    last event, rules due before the horizon fire and the final cross-sections
    are evaluated there.
    """
    if watch is None:
        watch = sorted(scenario.graph.things)
    else:
        for id in watch:
            scenario.graph.thing(id)
    stop = len(scenario.events) if upto is None else min(upto, len(scenario.events))
    stop = max(stop, start)  # an earlier upto is a no-op, never a rewind
    report = RunReport(scenario=scenario.name, watch=list(watch))
    for index in range(start, stop):
        event = scenario.events[index]
        before = _tables(engine, watch, event.t)
        engine.apply_event(event)
        report.rows.append(
            {
                "index": index,
                "t": format_timestamp(event.t),
                "kind": event.kind.value,
                "actor": event.actor,
                "target": event.target,
                "context": event.context,
                "before": before,
                "after": _tables(engine, watch, event.t),
            }
        )
    report.applied = stop
    report.complete = stop == len(scenario.events)
    if report.complete:
        engine.fire_time_rules(scenario.horizon)
        report.final = {
            "at": format_timestamp(scenario.horizon),
            "things": _tables(engine, watch, scenario.horizon),
        }
    return report


def render_text(report: RunReport) -> str:
    """Human-readable report: one before/after block per event."""
    out = io.StringIO()
    out.write(f"scenario: {report.scenario}\n")
    out.write(f"events applied: {report.applied}\n")
    for row in report.rows:
        target = row["target"] or row["context"] or "-"
        out.write(
            f"\n[{row['index']}] {row['t']} {row['kind']} by {row['actor']} on {target}\n"
        )
        out.write(f"  {'thing':<24} {'axis':<34} {'before':>8} {'after':>8}\n")
        for id in report.watch:
            before, after = row["before"][id], row["after"][id]
            out.write(
                f"  {id:<24} {'group':<34} {before['group']:>8.4f} {after['group']:>8.4f}\n"
            )
            for user in sorted(before["global"]):
                out.write(
                    f"  {id:<24} {f'global[{user}]':<34}"
                    f" {before['global'][user]:>8.4f} {after['global'][user]:>8.4f}\n"
                )
            for user in sorted(before["local"]):
                for ctx in sorted(before["local"][user]):
                    out.write(
                        f"  {id:<24} {f'local[{user}, {ctx}]':<34}"
                        f" {before['local'][user][ctx]:>8.4f} {after['local'][user][ctx]:>8.4f}\n"
                    )
    if report.final is not None:
        out.write(f"\nfinal cross-sections at {report.final['at']}\n")
        for id in report.watch:
            table = report.final["things"][id]
            out.write(f"  {id:<24} group={table['group']:.4f}\n")
            for user, value in sorted(table["global"].items()):
                out.write(f"  {id:<24} global[{user}]={value:.4f}\n")
            for user, per_ctx in sorted(table["local"].items()):
                for ctx, value in sorted(per_ctx.items()):
                    out.write(f"  {id:<24} local[{user}, {ctx}]={value:.4f}\n")
    return out.getvalue()


def final_csv(report: RunReport) -> str:
    """Final cross-sections as CSV: family,resource,user,context,mb."""
    out = io.StringIO()
    out.write("family,resource,user,context,mb\n")
    if report.final is None:
        return out.getvalue()
    things = report.final["things"]
    for id in report.watch:
        out.write(f"group,{id},,,{things[id]['group']:.6f}\n")
    for id in report.watch:
        for user, value in sorted(things[id]["global"].items()):
            out.write(f"global,{id},{user},,{value:.6f}\n")
    for id in report.watch:
        for user, per_ctx in sorted(things[id]["local"].items()):
            for ctx, value in sorted(per_ctx.items()):
                out.write(f"local,{id},{user},{ctx},{value:.6f}\n")
    return out.getvalue()
