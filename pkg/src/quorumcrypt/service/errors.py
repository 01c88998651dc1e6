"""Mapping of core exceptions to RPC error types and HTTP status codes."""

from __future__ import annotations

from ..orchestration import InvalidRequestError, UnknownKeyError
from ..schemes.errors import (
    InsufficientSharesError,
    IntegrityError,
    InvalidCiphertextError,
    MalformedError,
    NonceReuseError,
    ThresholdError,
    UnsupportedSchemeError,
)


class RpcFailure(Exception):
    def __init__(self, type_: str, message: str, status: int = 400):
        super().__init__(message)
        self.type = type_
        self.message = message
        self.status = status


_TABLE = (
    (UnknownKeyError, "unknown_key", 404),
    (InvalidCiphertextError, "invalid_ciphertext", 422),
    (UnsupportedSchemeError, "unsupported_scheme", 400),
    (InsufficientSharesError, "insufficient_shares", 422),
    (NonceReuseError, "nonce_reuse", 409),
    (IntegrityError, "integrity", 422),
    (MalformedError, "malformed", 400),
    (InvalidRequestError, "invalid_request", 400),
    (ThresholdError, "threshold", 422),
    (ValueError, "invalid_request", 400),
    (KeyError, "not_found", 404),
)


def classify(exc: Exception) -> RpcFailure:
    if isinstance(exc, RpcFailure):
        return exc
    for cls, name, status in _TABLE:
        if isinstance(exc, cls):
            return RpcFailure(name, str(exc) or cls.__name__, status)
    return RpcFailure("internal", f"{type(exc).__name__}: {exc}", 500)
