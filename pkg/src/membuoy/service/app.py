"""FastAPI surface over the buoyancy engine.

Sessions hold engine state in memory; scenario generation, validation and
timeline replay are stateless. Domain errors map onto HTTP statuses by
category, with machine-readable code/category in the error detail.
"""

from __future__ import annotations

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..errors import MBError
from ..events import parse_scenario, validate
from ..params import ParameterSet
from ..query import (
    context_listing,
    forgetful_search,
    mb_report,
    search_csv,
    timeline,
    timeline_csv,
)
from ..templates import generate_scenario
from ..timeutil import format_timestamp, parse_duration, parse_timestamp
from .schemas import (
    CreateSessionRequest,
    CrossSection,
    ErrorDetail,
    GenerateRequest,
    ListingEntry,
    ListingResponse,
    MBValue,
    RunRequest,
    RunResponse,
    SearchHit,
    SearchResponse,
    SessionInfo,
    TimelineRequest,
    TimelineResponse,
    ValidateRequest,
    ValidateResponse,
)
from .sessions import SessionNotFound, SessionStore

_STATUS_BY_CATEGORY = {
    "graph": 404,
    "scenario": 422,
    "engine": 409,
    "query": 422,
    "snapshot": 422,
    "session": 404,
    "internal": 500,
}


def create_app(store: SessionStore | None = None) -> FastAPI:
    app = FastAPI(title="membuoy", version=__version__)
    sessions = store or SessionStore()

    @app.exception_handler(MBError)
    async def mb_error_handler(request: Request, exc: MBError) -> JSONResponse:
        status = _STATUS_BY_CATEGORY.get(exc.category, 500)
        if isinstance(exc, SessionNotFound):
            status = 404
        elif exc.category == "session":
            status = 409
        detail = ErrorDetail(
            code=type(exc).__name__, category=exc.category, message=str(exc)
        )
        return JSONResponse(status_code=status, content={"detail": detail.model_dump()})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    # --- sessions ---------------------------------------------------------

    @app.post("/sessions", response_model=SessionInfo)
    def create_session(body: CreateSessionRequest) -> SessionInfo:
        session = sessions.create(
            body.scenario,
            params_doc=body.params,
            name=body.name,
            snapshot=body.snapshot,
            replace=body.replace,
        )
        return SessionInfo(**session.info())

    @app.get("/sessions")
    def list_sessions() -> dict:
        return {"sessions": sessions.names()}

    @app.get("/sessions/{name}", response_model=SessionInfo)
    def session_info(name: str) -> SessionInfo:
        return SessionInfo(**sessions.get(name).info())

    @app.delete("/sessions/{name}")
    def delete_session(name: str) -> dict:
        sessions.delete(name)
        return {"deleted": name}

    @app.post("/sessions/{name}/run", response_model=RunResponse)
    def run_session(name: str, body: RunRequest) -> RunResponse:
        report = sessions.get(name).run(body.watch, body.upto)
        return RunResponse(**report.to_obj())

    # --- buoyancy reads -----------------------------------------------------

    def _query_time(session, at: str | None) -> float:
        if at is not None:
            return parse_timestamp(at)
        return session.engine.resolve_query_time(None)

    @app.get("/sessions/{name}/mb/local", response_model=MBValue)
    def read_local(
        name: str, resource: str, user: str, context: str, at: str | None = None
    ) -> MBValue:
        session = sessions.get(name)
        t = _query_time(session, at)
        return MBValue(
            resource=resource,
            at=format_timestamp(t),
            value=session.engine.local_mb(resource, user, context, t),
        )

    @app.get("/sessions/{name}/mb/global", response_model=MBValue)
    def read_global(name: str, resource: str, user: str, at: str | None = None) -> MBValue:
        session = sessions.get(name)
        t = _query_time(session, at)
        return MBValue(
            resource=resource,
            at=format_timestamp(t),
            value=session.engine.global_mb(resource, user, t),
        )

    @app.get("/sessions/{name}/mb/group", response_model=MBValue)
    def read_group(name: str, resource: str, at: str | None = None) -> MBValue:
        session = sessions.get(name)
        t = _query_time(session, at)
        return MBValue(
            resource=resource,
            at=format_timestamp(t),
            value=session.engine.group_mb(resource, t),
        )

    @app.get("/sessions/{name}/report/{resource}", response_model=CrossSection)
    def read_report(name: str, resource: str, at: str | None = None) -> CrossSection:
        session = sessions.get(name)
        t = _query_time(session, at)
        return CrossSection(
            resource=resource,
            at=format_timestamp(t),
            values=mb_report(session.engine, resource, t),
        )

    # --- forgetful queries ----------------------------------------------------

    @app.get("/sessions/{name}/search")
    def search(
        name: str,
        keyword: str,
        user: str,
        threshold: float = Query(default=0.0),
        at: str | None = None,
        format: str = Query(default="json", pattern="^(json|csv)$"),
    ):
        session = sessions.get(name)
        t = _query_time(session, at)
        result = forgetful_search(session.engine, keyword, threshold, user, t)
        if format == "csv":
            return PlainTextResponse(search_csv(result), media_type="text/csv")
        return SearchResponse(
            hits=[SearchHit(id=id, mb=mb) for id, mb in result.hits],
            coverage=result.coverage,
            hidden=result.hidden_count,
        )

    @app.get("/sessions/{name}/contexts/{context}/listing", response_model=ListingResponse)
    def listing(name: str, context: str, user: str, at: str | None = None) -> ListingResponse:
        session = sessions.get(name)
        t = _query_time(session, at)
        entries = context_listing(session.engine, context, user, t)
        return ListingResponse(
            context=context,
            user=user,
            entries=[ListingEntry(id=id, mb=mb) for id, mb in entries],
        )

    # --- snapshots ---------------------------------------------------------------

    @app.get("/sessions/{name}/snapshot")
    def export_snapshot(name: str) -> dict:
        return sessions.get(name).export()

    @app.put("/sessions/{name}/snapshot", response_model=SessionInfo)
    def import_snapshot(name: str, snapshot: dict) -> SessionInfo:
        try:
            session = sessions.get(name)
        except SessionNotFound:
            session = sessions.create(None, name=name, snapshot=snapshot)
        else:
            session.restore(snapshot)
        return SessionInfo(**session.info())

    # --- stateless operations -------------------------------------------------------

    @app.post("/timeline")
    def run_timeline(
        body: TimelineRequest, format: str = Query(default="json", pattern="^(json|csv)$")
    ):
        scenario = parse_scenario(body.scenario)
        params = ParameterSet.from_obj(body.params) if body.params is not None else None
        series = timeline(
            scenario,
            body.resource,
            body.user,
            step=parse_duration(body.step),
            t_start=parse_timestamp(body.start) if body.start else None,
            t_end=parse_timestamp(body.end) if body.end else None,
            params=params,
        )
        if format == "csv":
            return PlainTextResponse(timeline_csv(series), media_type="text/csv")
        return TimelineResponse(
            resource=body.resource,
            user=body.user,
            series=[(format_timestamp(t), mb) for t, mb in series],
        )

    @app.post("/scenarios/generate")
    def generate(body: GenerateRequest) -> dict:
        scenario = generate_scenario(body.template, body.seed, body.params)
        return scenario.to_obj()

    @app.post("/scenarios/validate", response_model=ValidateResponse)
    def validate_scenario(body: ValidateRequest) -> ValidateResponse:
        scenario = parse_scenario(body.scenario)
        violations = validate(scenario)
        return ValidateResponse(ok=not violations, violations=violations)

    return app
