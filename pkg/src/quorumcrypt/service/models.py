"""Request and response bodies of the RPC interface.

Binary operands travel as base64 strings; instance ids as hex.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class SubmitRequest(BaseModel):
    kind: Literal["decrypt", "sign", "coin"]
    scheme: str
    key_id: str = "default"
    payload: str = Field(description="base64: encoded ciphertext, message to sign, or coin name")
    signing_set: list[int] | None = None
    slot: int | None = None


class SubmitResponse(BaseModel):
    instance_id: str


class PollResponse(BaseModel):
    instance_id: str
    status: Literal["pending", "finished", "failed", "unknown"]
    result: str | None = None
    error: str | None = None


class KeyHandle(BaseModel):
    scheme: str
    key_id: str = "default"


class EncryptParams(KeyHandle):
    plaintext: str
    label: str = ""


class CiphertextParams(KeyHandle):
    ciphertext: str


class RequestParams(KeyHandle):
    request: str = Field(description="base64 request: ciphertext, message or coin name")
    commitments: list[str] | None = Field(default=None, description="FROST signing package")


class ShareParams(RequestParams):
    share: str


class CombineParams(RequestParams):
    shares: list[str]


class ResultParams(RequestParams):
    result: str
    attestation: str | None = Field(default=None, description="CKS05: element and shares behind the coin")


class FrostRound2Params(RequestParams):
    nonce_handle: str


class RpcCall(BaseModel):
    method: str
    id: int | str | None = None
    params: dict[str, Any] = Field(default_factory=dict)


class RpcError(BaseModel):
    type: str
    message: str


class RpcReply(BaseModel):
    id: int | str | None = None
    result: Any = None
    error: RpcError | None = None


class Health(BaseModel):
    status: Literal["ready", "starting"]
    index: int
    n: int
    keys: list[str]
