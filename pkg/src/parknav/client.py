"""Client for the HTTP service.

Without a server URL, requests are dispatched in-process through the ASGI
transport, so the CLI works standalone while exercising the exact same
request/response path a deployed server would. With a URL, the same calls
go over the network.
"""

from __future__ import annotations

import asyncio
from typing import Any, Optional

import httpx


class ServiceError(RuntimeError):
    """Non-2xx response from the service."""

    def __init__(self, status_code: int, detail: Any):
        self.status_code = status_code
        self.detail = detail
        super().__init__(f"service returned {status_code}: {detail}")

    def detail_lines(self) -> list[str]:
        if isinstance(self.detail, dict) and "violations" in self.detail:
            return list(self.detail["violations"])
        if isinstance(self.detail, list):
            return [str(d) for d in self.detail]
        return [str(self.detail)]


class ServiceClient:
    def __init__(self, server: Optional[str] = None, timeout: float = 600.0):
        self.server = server
        self.timeout = timeout

    def _post(self, path: str, payload: dict) -> dict:
        return self._request("POST", path, payload)

    def _request(self, method: str, path: str, payload: Optional[dict] = None) -> dict:
        if self.server is not None:
            with httpx.Client(base_url=self.server, timeout=self.timeout) as client:
                resp = client.request(method, path, json=payload)
        else:
            resp = asyncio.run(self._asgi_request(method, path, payload))
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise ServiceError(resp.status_code, detail)
        return resp.json()

    async def _asgi_request(self, method: str, path: str, payload: Optional[dict]) -> httpx.Response:
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://parknav.local", timeout=self.timeout
        ) as client:
            return await client.request(method, path, json=payload)

    # ------------------------------------------------------------------
    # Endpoint wrappers
    # ------------------------------------------------------------------

    def health(self) -> dict:
        return self._request("GET", "/health")

    def synth(
        self,
        seed: int,
        n_lots: int = 21,
        total_capacity: int = 3992,
        n_entries: int = 12,
        demand: Optional[int] = None,
        allow_overflow: bool = False,
    ) -> dict:
        return self._post(
            "/scenario/synth",
            {
                "seed": seed,
                "n_lots": n_lots,
                "total_capacity": total_capacity,
                "n_entries": n_entries,
                "demand": demand,
                "allow_overflow": allow_overflow,
            },
        )

    def validate(self, scenario_doc: dict) -> dict:
        return self._post("/scenario/validate", {"scenario": scenario_doc})

    def optimize(
        self,
        scenario_doc: dict,
        seed: int = 0,
        mode: str = "at_most",
        planning_occupancy: Optional[float] = None,
    ) -> dict:
        return self._post(
            "/optimize",
            {
                "scenario": scenario_doc,
                "seed": seed,
                "mode": mode,
                "planning_occupancy": planning_occupancy,
            },
        )

    def simulate(self, scenario_doc: dict, **options: Any) -> dict:
        return self._post("/simulate", {"scenario": scenario_doc, **options})

    def compare(
        self,
        scenario_doc: dict,
        methods: list[str],
        runs: int = 10,
        seed: int = 0,
        parallel: bool = False,
    ) -> dict:
        return self._post(
            "/compare",
            {
                "scenario": scenario_doc,
                "methods": methods,
                "runs": runs,
                "seed": seed,
                "parallel": parallel,
            },
        )
