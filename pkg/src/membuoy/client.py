"""HTTP client for the buoyancy service.

The CLI talks to the service exclusively through this client. By default it
mounts the FastAPI app in-process (no server needed); pass a base URL to talk
to a remote instance instead.
"""

from __future__ import annotations

import asyncio

import httpx


class ServiceError(Exception):
    """Error reported by the service, carrying its code and category."""

    def __init__(self, code: str, category: str, message: str, status: int):
        super().__init__(message)
        self.code = code
        self.category = category
        self.status = status


class _SyncASGITransport(httpx.BaseTransport):
    """Drive an ASGI app from a synchronous httpx.Client.

    httpx's ASGITransport is async-only; this wrapper runs each request to
    completion on a private event loop and hands back a fully read response.
    """

    def __init__(self, app):
        self._transport = httpx.ASGITransport(app=app)
        self._loop = asyncio.new_event_loop()

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        async def _roundtrip():
            response = await self._transport.handle_async_request(request)
            body = await response.aread()
            await response.aclose()
            return response, body

        response, body = self._loop.run_until_complete(_roundtrip())
        return httpx.Response(
            status_code=response.status_code, headers=response.headers, content=body
        )

    def close(self) -> None:
        self._loop.run_until_complete(self._transport.aclose())
        self._loop.close()


class ServiceClient:
    def __init__(self, server: str | None = None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=60.0)
        else:
            from .service import create_app

            self._client = httpx.Client(
                transport=_SyncASGITransport(create_app()),
                base_url="http://membuoy.local",
                timeout=60.0,
            )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _unwrap(self, response: httpx.Response):
        if response.is_success:
            if response.headers.get("content-type", "").startswith("text/"):
                return response.text
            return response.json()
        try:
            detail = response.json().get("detail")
        except ValueError:
            detail = None
        if isinstance(detail, dict) and "code" in detail:
            raise ServiceError(
                detail["code"], detail.get("category", "internal"),
                detail.get("message", ""), response.status_code,
            )
        raise ServiceError(
            "HTTPError", "transport", str(detail or response.text), response.status_code
        )

    # --- sessions -----------------------------------------------------------

    def create_session(
        self,
        scenario: dict | None = None,
        params: dict | None = None,
        name: str | None = None,
        snapshot: dict | None = None,
        replace: bool = False,
    ) -> dict:
        return self._unwrap(
            self._client.post(
                "/sessions",
                json={
                    "scenario": scenario,
                    "params": params,
                    "name": name,
                    "snapshot": snapshot,
                    "replace": replace,
                },
            )
        )

    def delete_session(self, name: str) -> dict:
        return self._unwrap(self._client.delete(f"/sessions/{name}"))

    def run(self, name: str, watch: list[str] | None = None, upto: int | None = None) -> dict:
        return self._unwrap(
            self._client.post(f"/sessions/{name}/run", json={"watch": watch, "upto": upto})
        )

    def export_snapshot(self, name: str) -> dict:
        return self._unwrap(self._client.get(f"/sessions/{name}/snapshot"))

    def import_snapshot(self, name: str, snapshot: dict) -> dict:
        return self._unwrap(self._client.put(f"/sessions/{name}/snapshot", json=snapshot))

    # --- stateless operations --------------------------------------------------

    def generate(self, template: str, seed: int, params: dict) -> dict:
        return self._unwrap(
            self._client.post(
                "/scenarios/generate",
                json={"template": template, "seed": seed, "params": params},
            )
        )

    def timeline_csv(
        self,
        scenario: dict,
        resource: str,
        user: str,
        step: str | float,
        start: str | None = None,
        end: str | None = None,
        params: dict | None = None,
    ) -> str:
        return self._unwrap(
            self._client.post(
                "/timeline",
                params={"format": "csv"},
                json={
                    "scenario": scenario,
                    "params": params,
                    "resource": resource,
                    "user": user,
                    "step": step,
                    "start": start,
                    "end": end,
                },
            )
        )
