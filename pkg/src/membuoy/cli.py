"""mb — command line front door for the buoyancy engine.

All commands are thin clients of the HTTP service. Without --server they
mount the service in-process, so no daemon is required; with --server (or
MB_SERVER) they drive a remote instance. MB_PARAMS can point at a default
parameter config applied by `mb run`.

Exit codes:
  0  success
  2  usage error (bad flags)
  3  input file missing or unreadable
  4  malformed or invalid document (scenario, params, snapshot)
  5  engine or reference error
  6  service transport error
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .client import ServiceClient, ServiceError
from .harness import RunReport, final_csv, render_text

EXIT_OK = 0
EXIT_IO = 3
EXIT_INVALID = 4
EXIT_ENGINE = 5
EXIT_TRANSPORT = 6

_EXIT_BY_CATEGORY = {
    "graph": EXIT_ENGINE,
    "scenario": EXIT_INVALID,
    "engine": EXIT_ENGINE,
    "query": EXIT_INVALID,
    "snapshot": EXIT_INVALID,
    "session": EXIT_ENGINE,
    "transport": EXIT_TRANSPORT,
    "internal": EXIT_TRANSPORT,
}


class CLIError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _read_json(path: str, what: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read {what} {path!r}: {exc}", EXIT_IO) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"{what} {path!r} is not valid JSON: {exc}", EXIT_INVALID) from exc


def _load_params(args) -> dict | None:
    path = getattr(args, "params", None) or os.environ.get("MB_PARAMS")
    if not path:
        return None
    return _read_json(path, "parameter config")


def _client(args) -> ServiceClient:
    server = getattr(args, "server", None) or os.environ.get("MB_SERVER")
    return ServiceClient(server)


def _write_artifacts(out_dir: str, artifacts: dict[str, str]) -> None:
    """Write all artifacts to a temp dir, then move into place on success."""
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=target) as staging:
        staged = []
        for filename, content in artifacts.items():
            tmp_path = Path(staging) / filename
            tmp_path.write_text(content)
            staged.append((tmp_path, target / filename))
        for tmp_path, dest in staged:
            os.replace(tmp_path, dest)


def cmd_run(args) -> int:
    scenario_doc = _read_json(args.scenario, "scenario")
    params_doc = _load_params(args)
    watch = args.watch.split(",") if args.watch else None
    with _client(args) as client:
        snapshot = None
        if args.from_state:
            snapshot = _read_json(args.from_state, "state snapshot")
        session = client.create_session(
            scenario=scenario_doc, params=params_doc, snapshot=snapshot
        )
        name = session["name"]
        try:
            raw = client.run(name, watch=watch, upto=args.upto)
            if args.save_state:
                state = client.export_snapshot(name)
                Path(args.save_state).write_text(
                    json.dumps(state, indent=2, sort_keys=True) + "\n"
                )
        finally:
            client.delete_session(name)
    report = RunReport(
        scenario=raw["scenario"],
        watch=raw["watch"],
        rows=raw["rows"],
        final=raw["final"],
        applied=raw["applied"],
        complete=raw["complete"],
    )
    text = render_text(report)
    if args.out:
        _write_artifacts(
            args.out,
            {
                "report.json": report.to_json(),
                "report.txt": text,
                "final_mb.csv": final_csv(report),
            },
        )
        print(f"run complete: {report.applied} events, artifacts in {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_timeline(args) -> int:
    scenario_doc = _read_json(args.scenario, "scenario")
    params_doc = _load_params(args)
    with _client(args) as client:
        csv_text = client.timeline_csv(
            scenario_doc,
            resource=args.resource,
            user=args.user,
            step=args.step,
            start=args.start,
            end=args.end,
            params=params_doc,
        )
    if args.out:
        _write_artifacts(
            str(Path(args.out).parent or "."), {Path(args.out).name: csv_text}
        )
        print(f"timeline written to {args.out}")
    else:
        print(csv_text, end="")
    return EXIT_OK


def cmd_snapshot(args) -> int:
    with _client(args) as client:
        if args.action == "save":
            state = client.export_snapshot(args.session)
            Path(args.path).write_text(json.dumps(state, indent=2, sort_keys=True) + "\n")
            print(f"session {args.session!r} saved to {args.path}")
        else:
            snapshot = _read_json(args.path, "state snapshot")
            info = client.import_snapshot(args.session, snapshot)
            print(f"session {info['name']!r} restored from {args.path}")
    return EXIT_OK


def cmd_gen(args) -> int:
    params: dict = {}
    for pair in args.param or []:
        if "=" not in pair:
            raise CLIError(f"--param expects key=value, got {pair!r}", EXIT_INVALID)
        key, value = pair.split("=", 1)
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                params[key] = value
    with _client(args) as client:
        scenario = client.generate(args.template, args.seed, params)
    text = json.dumps(scenario, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"scenario written to {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mb",
        description="Memory-buoyancy engine: run scenarios, export timelines, manage state.",
        epilog=(
            "exit codes: 0 ok, 2 usage, 3 missing file, 4 invalid document, "
            "5 engine error, 6 service error. "
            "Env: MB_SERVER (remote service URL), MB_PARAMS (default parameter config)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="apply a scenario and emit the before/after report")
    run.add_argument("scenario", help="scenario JSON file")
    run.add_argument("--params", help="parameter config JSON file")
    run.add_argument("--watch", help="comma-separated thing ids (default: all things)")
    run.add_argument("--out", help="output directory for report.json/report.txt/final_mb.csv")
    run.add_argument("--upto", type=int, help="apply only the first N events")
    run.add_argument("--save-state", help="write the engine state snapshot here after the run")
    run.add_argument("--from-state", help="resume from a previously saved state snapshot")
    run.add_argument("--server", help="remote service URL (default: in-process)")
    run.set_defaults(func=cmd_run)

    tl = sub.add_parser("timeline", help="replay a scenario and export an MB time series")
    tl.add_argument("scenario", help="scenario JSON file")
    tl.add_argument("--resource", required=True, help="thing id to sample")
    tl.add_argument("--user", required=True, help="user id whose global MB is sampled")
    tl.add_argument("--step", default="1d", help="sample step (e.g. 1d, 6h, 900s)")
    tl.add_argument("--start", help="ISO start (default: first event)")
    tl.add_argument("--end", help="ISO end (default: scenario horizon)")
    tl.add_argument("--out", help="CSV output path (default: stdout)")
    tl.add_argument("--params", help="parameter config JSON file")
    tl.add_argument("--server", help="remote service URL (default: in-process)")
    tl.set_defaults(func=cmd_timeline)

    snap = sub.add_parser("snapshot", help="save or load engine state for a session")
    snap.add_argument("action", choices=["save", "load"])
    snap.add_argument("path", help="state snapshot JSON file")
    snap.add_argument("--session", default="default", help="session name (default: 'default')")
    snap.add_argument("--server", help="remote service URL (default: in-process)")
    snap.set_defaults(func=cmd_snapshot)

    gen = sub.add_parser("gen", help="generate a scenario from a template")
    gen.add_argument("--template", required=True)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--param", action="append", help="template parameter key=value")
    gen.add_argument("--out", help="scenario output path (default: stdout)")
    gen.add_argument("--server", help="remote service URL (default: in-process)")
    gen.set_defaults(func=cmd_gen)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"mb: {exc}", file=sys.stderr)
        return exc.exit_code
    except ServiceError as exc:
        print(f"mb: {exc.code}: {exc}", file=sys.stderr)
        return _EXIT_BY_CATEGORY.get(exc.category, EXIT_TRANSPORT)
    except OSError as exc:
        print(f"mb: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
