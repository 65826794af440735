"""membuoy: an event-sourced memory-buoyancy engine for semantic graphs.

Buoyancy is a normalized [0, 1] relevance score per graph thing that rises
with use and sinks without it. The engine scores three axes — per
(resource, user, context), per (resource, user), and per resource across all
users — and powers threshold-hiding search, context listings and timelines.
"""

__version__ = "0.1.0"

from .engine import Engine
from .events import Event, EventKind, Scenario, parse_scenario, validate
from .graph import Graph, Relation, Thing, ThingType
from .params import DEFAULT_PARAMS, ParameterSet
from .query import context_listing, forgetful_search, mb_report, timeline
from .records import BuoyancyRecord, decay_factor, refresh, stimulate
from .templates import TEMPLATES, generate_scenario

__all__ = [
    "__version__",
    "BuoyancyRecord",
    "DEFAULT_PARAMS",
    "Engine",
    "Event",
    "EventKind",
    "Graph",
    "ParameterSet",
    "Relation",
    "Scenario",
    "TEMPLATES",
    "Thing",
    "ThingType",
    "context_listing",
    "decay_factor",
    "forgetful_search",
    "generate_scenario",
    "mb_report",
    "parse_scenario",
    "refresh",
    "stimulate",
    "timeline",
    "validate",
]
