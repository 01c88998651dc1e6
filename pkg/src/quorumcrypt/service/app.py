"""HTTP binding of the protocol API and the scheme API.

Besides the REST-style routes, ``POST /rpc`` accepts ``{"method", "id",
"params"}`` calls with the method names ``protocol.submit``,
``protocol.poll``, ``node.health`` and ``scheme.<primitive>``.
"""

from __future__ import annotations

from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse

from . import models as m
from .errors import RpcFailure, classify
from .node import Node
from .scheme_api import PRIMITIVES


def _error_response(exc: Exception) -> JSONResponse:
    f = classify(exc)
    return JSONResponse({"error": {"type": f.type, "message": f.message}}, status_code=f.status)


def create_app(node: Node) -> FastAPI:
    app = FastAPI(title="quorumcrypt node", version="1")

    @app.exception_handler(RpcFailure)
    async def _rpc_failure(request: Request, exc: RpcFailure):
        return _error_response(exc)

    @app.exception_handler(Exception)
    async def _any_failure(request: Request, exc: Exception):
        return _error_response(exc)

    @app.get("/health", response_model=m.Health)
    async def health():
        return node.health()

    @app.post("/protocol/submit", response_model=m.SubmitResponse)
    async def submit(body: m.SubmitRequest):
        try:
            return node.submit(body)
        except Exception as exc:
            return _error_response(exc)

    @app.get("/protocol/poll/{instance_id}", response_model=m.PollResponse)
    async def poll(instance_id: str):
        try:
            return node.poll(instance_id)
        except Exception as exc:
            return _error_response(exc)

    @app.post("/scheme/{primitive}")
    async def scheme(primitive: str, params: dict[str, Any] = Body(default_factory=dict)):
        try:
            return node.scheme_api.call(primitive, params)
        except Exception as exc:
            return _error_response(exc)

    @app.post("/rpc", response_model=m.RpcReply)
    async def rpc(call: m.RpcCall):
        try:
            result = dispatch(node, call.method, call.params)
        except Exception as exc:
            f = classify(exc)
            return m.RpcReply(id=call.id, error=m.RpcError(type=f.type, message=f.message))
        return m.RpcReply(id=call.id, result=result)

    return app


METHODS = ("protocol.submit", "protocol.poll", "node.health") + tuple(f"scheme.{p}" for p in PRIMITIVES)


def dispatch(node: Node, method: str, params: dict) -> Any:
    if method == "protocol.submit":
        return node.submit(m.SubmitRequest.model_validate(params)).model_dump()
    if method == "protocol.poll":
        if "instance_id" not in params:
            raise RpcFailure("invalid_request", "protocol.poll needs instance_id")
        return node.poll(str(params["instance_id"])).model_dump()
    if method == "node.health":
        return node.health().model_dump()
    if method.startswith("scheme."):
        return node.scheme_api.call(method[len("scheme."):], params)
    raise RpcFailure("unknown_method", f"no RPC method {method!r}", 404)
