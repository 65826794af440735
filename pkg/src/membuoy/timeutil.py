"""Timestamp and duration helpers.

All timestamps are handled internally as POSIX seconds (float) and exchanged
externally as ISO-8601 UTC strings. Durations accept a small suffix grammar
("10d", "12h", "30m", "45s", or a bare number of seconds).
"""

from __future__ import annotations

from datetime import datetime, timezone

from .errors import MalformedDocument

SECOND = 1.0
MINUTE = 60.0
HOUR = 3600.0
DAY = 86400.0

_SUFFIXES = {"s": SECOND, "m": MINUTE, "h": HOUR, "d": DAY}


def parse_timestamp(value: str | int | float) -> float:
    """Parse an ISO-8601 instant (or raw POSIX seconds) to POSIX seconds.

    Naive datetimes are interpreted as UTC. A trailing ``Z`` is accepted.
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise MalformedDocument(f"timestamp must be a string or number, got {type(value).__name__}")
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise MalformedDocument(f"invalid ISO-8601 timestamp {value!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def format_timestamp(t: float) -> str:
    """Format POSIX seconds as an ISO-8601 UTC string with a Z suffix."""
    dt = datetime.fromtimestamp(t, tz=timezone.utc)
    if dt.microsecond == 0:
        return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def parse_duration(value: str | int | float) -> float:
    """Parse a duration to seconds. Accepts "1d", "6h", "15m", "30s" or a number."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise MalformedDocument(f"duration must be a string or number, got {type(value).__name__}")
    text = value.strip().lower()
    if not text:
        raise MalformedDocument("empty duration")
    if text[-1] in _SUFFIXES:
        scale = _SUFFIXES[text[-1]]
        text = text[:-1]
    else:
        scale = SECOND
    try:
        amount = float(text)
    except ValueError as exc:
        raise MalformedDocument(f"invalid duration {value!r}") from exc
    return amount * scale
