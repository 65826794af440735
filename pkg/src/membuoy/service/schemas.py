"""Pydantic request/response models for the buoyancy service."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: dict | None = None
    params: dict | None = None
    name: str | None = None
    snapshot: dict | None = None
    replace: bool = False


class SessionInfo(BaseModel):
    name: str
    scenario: str | None
    events_total: int
    events_applied: int
    complete: bool
    active_contexts: dict[str, str]


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    watch: list[str] | None = None
    upto: int | None = Field(default=None, ge=0)


class RunResponse(BaseModel):
    scenario: str
    watch: list[str]
    rows: list[dict]
    final: dict | None
    applied: int
    complete: bool


class MBValue(BaseModel):
    resource: str
    at: str
    value: float


class CrossSection(BaseModel):
    resource: str
    at: str
    values: dict


class SearchHit(BaseModel):
    id: str
    mb: float


class SearchResponse(BaseModel):
    hits: list[SearchHit]
    coverage: float
    hidden: int


class ListingEntry(BaseModel):
    id: str
    mb: float


class ListingResponse(BaseModel):
    context: str
    user: str
    entries: list[ListingEntry]


class TimelineRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: dict
    params: dict | None = None
    resource: str
    user: str
    step: float | str = "1d"
    start: str | None = None
    end: str | None = None


class TimelineResponse(BaseModel):
    resource: str
    user: str
    series: list[tuple[str, float]]


class GenerateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    template: str
    seed: int = 1
    params: dict = Field(default_factory=dict)


class ValidateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: dict


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[str]


class ErrorDetail(BaseModel):
    code: str
    category: str
    message: str
