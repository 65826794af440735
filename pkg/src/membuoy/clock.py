"""Activity clocks: per-user time axes that absorb idle gaps.

Buoyancy decays in *activity time*, not wall time. Each gap between a user's
consecutive events contributes at most ``idle_cap`` seconds, so a three-week
vacation costs the same decay as a 48-hour lapse. The clock keeps the full
list of observed event times, which makes the wall-to-activity projection
exact at any queried instant.
"""

from __future__ import annotations

from bisect import bisect_right

from .errors import ClockRegression, InvalidInterval


class ActivityClock:
    """Monotone mapping from wall-clock seconds to accumulated activity seconds."""

    __slots__ = ("idle_cap", "_times", "_prefix")

    def __init__(self, idle_cap: float):
        self.idle_cap = idle_cap
        self._times: list[float] = []
        self._prefix: list[float] = []

    def observe(self, t: float) -> None:
        """Record an event at wall time t. Events must arrive in order."""
        if self._times:
            last = self._times[-1]
            if t < last:
                raise ClockRegression(f"event at {t} precedes last observed {last}")
            if t == last:
                return
            self._prefix.append(self._prefix[-1] + min(t - last, self.idle_cap))
        else:
            self._prefix.append(0.0)
        self._times.append(t)

    def project(self, t: float) -> float:
        """Activity time accumulated up to wall time t.

        Between events the clock advances linearly for ``idle_cap`` seconds,
        then plateaus until the next event. Before the first event it is 0.
        """
        if not self._times or t <= self._times[0]:
            return 0.0
        i = bisect_right(self._times, t) - 1
        return self._prefix[i] + min(t - self._times[i], self.idle_cap)

    def elapsed(self, t0: float, t1: float) -> float:
        """Activity time elapsed between wall instants t0 and t1."""
        if t0 > t1:
            raise InvalidInterval(f"interval start {t0} after end {t1}")
        return self.project(t1) - self.project(t0)

    @property
    def last_event(self) -> float | None:
        return self._times[-1] if self._times else None

    def to_obj(self) -> dict:
        return {"events": list(self._times)}

    @classmethod
    def from_obj(cls, obj: dict, idle_cap: float) -> "ActivityClock":
        clock = cls(idle_cap)
        for t in obj.get("events", []):
            clock.observe(float(t))
        return clock
