"""Buoyancy records and the stimulation/decay update rules.

A record stores the static part of a buoyancy value: the base as of
``last_update`` (in activity seconds of the owning clock) plus the recent
stimulation history. The dynamic part — decay since the last update — is
computed on read, so values stay current without background recalculation.

Decay is a single power law

    d(dt) = (1 + dt / tau_eff) ** -alpha_eff

giving the steep early decline and the long slow tail. ``tau_eff`` stretches
with recent stimulation frequency (regular access makes values sticky enough
to saturate toward 1.0) and ``alpha_eff`` is boosted for completed items that
nothing has touched lately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ClockRegression, FrozenRecord, InvalidDuration, InvalidWeight
from .params import COMPLETION_GRACE_DAYS, ParameterSet, TypeRow
from .timeutil import DAY


@dataclass
class BuoyancyRecord:
    """Static/dynamic split state for one (resource, owner) scoring axis."""

    base: float = 0.0
    last_update: float = 0.0          # activity seconds of the owning clock
    stim_history: list[float] = field(default_factory=list)
    frozen: bool = False
    frozen_at: float | None = None

    def copy(self) -> "BuoyancyRecord":
        return BuoyancyRecord(
            base=self.base,
            last_update=self.last_update,
            stim_history=list(self.stim_history),
            frozen=self.frozen,
            frozen_at=self.frozen_at,
        )


def decay_factor(
    row: TypeRow,
    params: ParameterSet,
    elapsed: float,
    recent_count: int,
    *,
    boosted: bool = False,
) -> float:
    """Multiplicative decay over ``elapsed`` activity seconds.

    ``recent_count`` stretches tau: tau_eff = tau * (1 + kappa * count), so
    frequently stimulated things lose value more slowly. ``boosted`` applies
    the completed-item exponent alpha * c.
    """
    if elapsed < 0:
        raise InvalidDuration(f"negative elapsed time {elapsed}")
    tau_eff = row.tau_s * (1.0 + params.frequency_kappa * recent_count)
    alpha_eff = row.alpha * (params.completion_boost if boosted else 1.0)
    return (1.0 + elapsed / tau_eff) ** (-alpha_eff)


def _boost_applies(record: BuoyancyRecord, now: float, completed: bool) -> bool:
    # A stimulation inside the grace window is the indicator that keeps a
    # completed item decaying normally. An empty history means the last
    # stimulation already fell out of the (longer) recency window.
    if not completed:
        return False
    if not record.stim_history:
        return True
    return now - record.stim_history[-1] >= COMPLETION_GRACE_DAYS * DAY


def peek(
    record: BuoyancyRecord,
    row: TypeRow,
    params: ParameterSet,
    now: float,
    *,
    completed: bool = False,
) -> float:
    """Current value at activity time ``now`` without mutating anything.

    Frozen records report their frozen base regardless of ``now``.
    """
    if record.frozen:
        return record.base
    if now < record.last_update:
        raise ClockRegression(
            f"read at activity time {now} before record update {record.last_update}"
        )
    factor = decay_factor(
        row,
        params,
        now - record.last_update,
        len(record.stim_history),
        boosted=_boost_applies(record, now, completed),
    )
    return record.base * factor


def refresh(
    record: BuoyancyRecord,
    row: TypeRow,
    params: ParameterSet,
    now: float,
    *,
    completed: bool = False,
) -> BuoyancyRecord:
    """Charge decay up to ``now`` and prune the stimulation window.

    Pure: returns a new record. The decay uses the stored history count;
    pruning to the recency window happens afterwards.
    """
    if record.frozen:
        raise FrozenRecord("cannot refresh a frozen record")
    base = peek(record, row, params, now, completed=completed)
    window_start = now - params.recency_window_s
    return BuoyancyRecord(
        base=base,
        last_update=now,
        stim_history=[t for t in record.stim_history if t > window_start],
        frozen=False,
        frozen_at=None,
    )


def stimulate(
    record: BuoyancyRecord,
    row: TypeRow,
    params: ParameterSet,
    weight: float,
    now: float,
    *,
    completed: bool = False,
) -> BuoyancyRecord:
    """Refresh, then raise the base by the gap-closing update rule.

    b <- b + (1 - b) * g * w * r, where r = min(1, gap / refractory) damps
    rapid-fire repeats (r = 1 for the first stimulation). A zero weight is a
    pure refresh and leaves the history untouched.
    """
    if not (0.0 <= weight <= 1.0):
        raise InvalidWeight(f"stimulation weight {weight} outside [0, 1]")
    updated = refresh(record, row, params, now, completed=completed)
    if weight == 0.0:
        return updated
    if updated.stim_history:
        gap = now - updated.stim_history[-1]
        ramp = min(1.0, gap / params.refractory_s)
    else:
        ramp = 1.0
    updated.base = updated.base + (1.0 - updated.base) * params.gain * weight * ramp
    updated.stim_history.append(now)
    return updated
