"""Thin HTTP client for a node's RPC service."""

from __future__ import annotations

import time
from typing import Any

import httpx

from ..schemes.core import b64, unb64


class RpcClientError(RuntimeError):
    def __init__(self, type_: str, message: str, status: int | None = None):
        super().__init__(f"{type_}: {message}")
        self.type = type_
        self.message = message
        self.status = status


class Client:
    def __init__(self, address: str, timeout: float = 10.0):
        base = address if address.startswith("http") else f"http://{address}"
        self.http = httpx.Client(base_url=base, timeout=timeout)

    def close(self) -> None:
        self.http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _check(self, r: httpx.Response) -> Any:
        if r.status_code >= 400:
            try:
                err = r.json()["error"]
                raise RpcClientError(err["type"], err["message"], r.status_code)
            except (ValueError, KeyError, TypeError):
                raise RpcClientError("http", r.text, r.status_code) from None
        return r.json()

    def health(self) -> dict:
        return self._check(self.http.get("/health"))

    def submit(self, kind: str, scheme: str, payload: bytes, key_id: str = "default", **frost) -> str:
        body = {"kind": kind, "scheme": scheme, "key_id": key_id, "payload": b64(payload), **frost}
        return self._check(self.http.post("/protocol/submit", json=body))["instance_id"]

    def poll(self, instance_id: str) -> dict:
        return self._check(self.http.get(f"/protocol/poll/{instance_id}"))

    def wait(self, instance_id: str, timeout: float = 10.0, interval: float = 0.02) -> dict:
        deadline = time.monotonic() + timeout
        while True:
            r = self.poll(instance_id)
            if r["status"] in ("finished", "failed") or time.monotonic() > deadline:
                return r
            time.sleep(interval)

    def scheme(self, primitive: str, **params) -> dict:
        return self._check(self.http.post(f"/scheme/{primitive}", json=params))

    def rpc(self, method: str, params: dict | None = None, id: int | str | None = 1) -> Any:
        reply = self._check(self.http.post("/rpc", json={"method": method, "id": id, "params": params or {}}))
        if reply.get("error"):
            raise RpcClientError(reply["error"]["type"], reply["error"]["message"])
        return reply["result"]


def result_bytes(poll: dict) -> bytes | None:
    return unb64(poll["result"]) if poll.get("result") is not None else None
