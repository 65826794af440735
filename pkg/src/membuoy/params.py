"""Engine parameters: per-type decay rows plus the shared tuning knobs.

All durations in the config file are expressed in human units (days/hours);
internally everything is converted to seconds once at load time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import BadParam, MalformedDocument
from .graph import ThingType
from .timeutil import DAY, HOUR

# Activity-days without stimulation after which a completed item's decay
# exponent is boosted. Recent stimulation is the indicator that suppresses it.
COMPLETION_GRACE_DAYS = 7.0


@dataclass(frozen=True)
class TypeRow:
    """Decay curve parameters for one thing type."""

    tau_s: float   # characteristic decay time, seconds
    alpha: float   # decay exponent

    @property
    def tau_days(self) -> float:
        return self.tau_s / DAY


# Encodes the type heuristic: ephemeral items (emails) sink quickly, durable
# anchors (persons, projects) linger.
_DEFAULT_ROWS_DAYS: dict[ThingType, tuple[float, float]] = {
    ThingType.GENERIC: (7.0, 1.0),
    ThingType.EMAIL: (2.0, 1.2),
    ThingType.PERSON: (30.0, 0.6),
    ThingType.DOCUMENT: (14.0, 0.8),
    ThingType.PRESENTATION: (14.0, 0.8),
    ThingType.TASK: (7.0, 1.0),
    ThingType.CALENDAR_EVENT: (7.0, 1.0),
    ThingType.PROJECT: (60.0, 0.5),
    ThingType.CONTEXT: (30.0, 0.7),
    ThingType.WEB_PAGE: (7.0, 1.0),
    ThingType.TOPIC: (30.0, 0.7),
    ThingType.USER: (30.0, 0.6),
}

DEFAULT_EVENT_WEIGHTS: dict[str, float] = {
    "create": 1.0,
    "modify": 0.9,
    "annotate": 0.8,
    "view": 0.7,
    "complete": 0.9,
}


@dataclass(frozen=True)
class ParameterSet:
    """Full tuning surface of the buoyancy engine."""

    rows: dict[ThingType, TypeRow] = field(
        default_factory=lambda: {
            t: TypeRow(tau_s=tau * DAY, alpha=alpha)
            for t, (tau, alpha) in _DEFAULT_ROWS_DAYS.items()
        }
    )
    gain: float = 0.5                      # stimulation gain g
    event_weights: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_EVENT_WEIGHTS)
    )
    system_weight: float = 0.3             # weight of system stimuli (rules, switches)
    refractory_s: float = 1.0 * HOUR       # full-effect gap between stimulations
    idle_cap_s: float = 48.0 * HOUR        # max activity-time contribution per idle gap
    spread_rho: float = 0.5                # per-hop damping
    spread_depth: int = 2                  # max hops
    spread_epsilon: float = 0.01           # weight cutoff
    recency_window_s: float = 14.0 * DAY   # stimulation history window W
    frequency_kappa: float = 0.5           # tau stretch per recent stimulation
    completion_boost: float = 1.5          # alpha multiplier for idle completed items
    event_lead_s: float = 3.0 * DAY        # upcoming-event stimulation window L

    def row(self, type: ThingType) -> TypeRow:
        return self.rows[type]

    def weight(self, kind_value: str) -> float:
        return self.event_weights[kind_value]

    def validate(self) -> None:
        """Check every numeric constraint; raises BadParam on violation."""
        if not (0.0 < self.gain <= 1.0):
            raise BadParam(f"gain must be in (0, 1], got {self.gain}")
        for kind, w in self.event_weights.items():
            if not (0.0 <= w <= 1.0):
                raise BadParam(f"event weight {kind}={w} outside [0, 1]")
        if not (0.0 <= self.system_weight <= 1.0):
            raise BadParam(f"system_weight {self.system_weight} outside [0, 1]")
        for bound, name in (
            (self.refractory_s, "refractory"),
            (self.idle_cap_s, "idle cap"),
            (self.recency_window_s, "recency window"),
            (self.event_lead_s, "event lead window"),
        ):
            if bound <= 0:
                raise BadParam(f"{name} must be positive")
        if not (0.0 < self.spread_rho < 1.0):
            raise BadParam(f"spread_rho must be in (0, 1), got {self.spread_rho}")
        if not (0.0 < self.spread_epsilon < 1.0):
            raise BadParam(f"spread_epsilon must be in (0, 1), got {self.spread_epsilon}")
        if self.spread_depth < 1:
            raise BadParam("spread_depth must be >= 1")
        if self.frequency_kappa < 0:
            raise BadParam("frequency_kappa must be >= 0")
        if self.completion_boost < 1.0:
            raise BadParam("completion_boost must be >= 1")
        missing = [t.value for t in ThingType if t not in self.rows]
        if missing:
            raise BadParam(f"missing type rows: {missing}")
        for t, row in self.rows.items():
            if row.tau_s <= 0 or row.alpha <= 0:
                raise BadParam(f"type row {t.value} needs tau > 0 and alpha > 0")
        # Emails must sink strictly faster than persons at every horizon;
        # tau_e <= tau_p and alpha_e >= alpha_p (one strict) guarantees it.
        email, person = self.rows[ThingType.EMAIL], self.rows[ThingType.PERSON]
        faster = email.tau_s <= person.tau_s and email.alpha >= person.alpha
        strictly = email.tau_s < person.tau_s or email.alpha > person.alpha
        if not (faster and strictly):
            raise BadParam("email row must decay strictly faster than person row")

    # --- config file format -------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "gain": self.gain,
            "event_weights": dict(sorted(self.event_weights.items())),
            "system_weight": self.system_weight,
            "refractory_hours": self.refractory_s / HOUR,
            "idle_cap_hours": self.idle_cap_s / HOUR,
            "spread_rho": self.spread_rho,
            "spread_depth": self.spread_depth,
            "spread_epsilon": self.spread_epsilon,
            "recency_window_days": self.recency_window_s / DAY,
            "frequency_kappa": self.frequency_kappa,
            "completion_boost": self.completion_boost,
            "event_lead_days": self.event_lead_s / DAY,
            "type_rows": {
                t.value: {"tau_days": row.tau_days, "alpha": row.alpha}
                for t, row in sorted(self.rows.items(), key=lambda kv: kv[0].value)
            },
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "ParameterSet":
        """Merge a config object over the defaults. Unknown keys are rejected."""
        if not isinstance(obj, dict):
            raise MalformedDocument("parameter config must be an object")
        known = {
            "gain", "event_weights", "system_weight", "refractory_hours",
            "idle_cap_hours", "spread_rho", "spread_depth", "spread_epsilon",
            "recency_window_days", "frequency_kappa", "completion_boost",
            "event_lead_days", "type_rows",
        }
        unknown = set(obj) - known
        if unknown:
            raise BadParam(f"unknown parameter keys: {sorted(unknown)}")
        base = cls()

        def number(key: str, default: float) -> float:
            value = obj.get(key, default)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise BadParam(f"parameter {key} must be a number")
            return float(value)

        weights = dict(base.event_weights)
        for kind, w in (obj.get("event_weights") or {}).items():
            if kind not in weights:
                raise BadParam(f"unknown event weight key {kind!r}")
            if isinstance(w, bool) or not isinstance(w, (int, float)):
                raise BadParam(f"event weight {kind} must be a number")
            weights[kind] = float(w)

        rows = dict(base.rows)
        for name, row in (obj.get("type_rows") or {}).items():
            try:
                t = ThingType(name)
            except ValueError:
                raise BadParam(f"unknown type row {name!r}") from None
            if not isinstance(row, dict) or set(row) - {"tau_days", "alpha"}:
                raise BadParam(f"type row {name} accepts only tau_days and alpha")
            rows[t] = TypeRow(
                tau_s=float(row.get("tau_days", rows[t].tau_days)) * DAY,
                alpha=float(row.get("alpha", rows[t].alpha)),
            )

        depth = obj.get("spread_depth", base.spread_depth)
        if isinstance(depth, bool) or not isinstance(depth, int):
            raise BadParam("spread_depth must be an integer")

        params = cls(
            rows=rows,
            gain=number("gain", base.gain),
            event_weights=weights,
            system_weight=number("system_weight", base.system_weight),
            refractory_s=number("refractory_hours", base.refractory_s / HOUR) * HOUR,
            idle_cap_s=number("idle_cap_hours", base.idle_cap_s / HOUR) * HOUR,
            spread_rho=number("spread_rho", base.spread_rho),
            spread_depth=depth,
            spread_epsilon=number("spread_epsilon", base.spread_epsilon),
            recency_window_s=number("recency_window_days", base.recency_window_s / DAY) * DAY,
            frequency_kappa=number("frequency_kappa", base.frequency_kappa),
            completion_boost=number("completion_boost", base.completion_boost),
            event_lead_s=number("event_lead_days", base.event_lead_s / DAY) * DAY,
        )
        params.validate()
        return params

    @classmethod
    def from_json(cls, text: str) -> "ParameterSet":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON in parameter config: {exc}") from exc
        return cls.from_obj(obj)


DEFAULT_PARAMS = ParameterSet()
DEFAULT_PARAMS.validate()
