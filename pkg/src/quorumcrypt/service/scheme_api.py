"""Direct access to the scheme primitives with a node's local keys.

Stateless apart from FROST round-one nonces, which are kept under a random
handle until the matching round-two call consumes them.
"""

from __future__ import annotations

import secrets
import threading
from typing import Any

from pydantic import BaseModel

from ..orchestration import KeyStore
from ..rng import system_rng
from ..schemes import registry
from ..schemes.core import SchemeId, SchemeKind, b64, unb64
from ..schemes.errors import MalformedError, UnsupportedSchemeError
from ..schemes.kg20 import FrostNonces, decode_commitment, encode_commitment
from ..schemes.keyfile import public_record
from . import models as m
from .errors import RpcFailure

PRIMITIVES = ("public_key", "encrypt", "verify_ciphertext", "partial", "verify_share", "combine", "verify_result",
              "frost_round1", "frost_round2")


def _b(text: str) -> bytes:
    try:
        return unb64(text)
    except ValueError as exc:
        raise MalformedError("operand is not valid base64") from exc


class SchemeApi:
    def __init__(self, keystore: KeyStore):
        self.keystore = keystore
        self._nonces: dict[str, FrostNonces] = {}
        self._lock = threading.Lock()

    _MODELS = {
        "public_key": m.KeyHandle,
        "encrypt": m.EncryptParams,
        "verify_ciphertext": m.CiphertextParams,
        "partial": m.RequestParams,
        "verify_share": m.ShareParams,
        "combine": m.CombineParams,
        "verify_result": m.ResultParams,
        "frost_round1": m.KeyHandle,
        "frost_round2": m.FrostRound2Params,
    }

    def call(self, primitive: str, params: dict | BaseModel) -> dict:
        if primitive not in self._MODELS:
            raise RpcFailure("unknown_method", f"no scheme primitive {primitive!r}", 404)
        model = self._MODELS[primitive]
        if not isinstance(params, model):
            params = model.model_validate(params if isinstance(params, dict) else params.model_dump())
        return getattr(self, primitive)(params)

    # -- helpers -----------------------------------------------------------------------

    def _entry(self, h: m.KeyHandle):
        return self.keystore.get(SchemeId.parse(h.scheme), h.key_id)

    def _request(self, impl, pk, p: m.RequestParams) -> Any:
        data = _b(p.request)
        if impl.id.kind is SchemeKind.CIPHER:
            return impl.ciphertext_from_bytes(data)
        if impl.id is SchemeId.KG20:
            if not p.commitments:
                raise MalformedError("KG20 requests need the signing package commitments")
            return impl.signing_request(pk, data, [decode_commitment(_b(c)) for c in p.commitments])
        return data

    # -- primitives --------------------------------------------------------------------

    def public_key(self, p: m.KeyHandle) -> dict:
        return {"public": public_record(self._entry(p).public)}

    def encrypt(self, p: m.EncryptParams) -> dict:
        pk = self._entry(p).public
        impl = registry.get(pk.scheme)
        if pk.scheme.kind is not SchemeKind.CIPHER:
            raise UnsupportedSchemeError(f"{pk.scheme.value} does not encrypt")
        c = impl.encrypt(pk, _b(p.label), _b(p.plaintext), system_rng())
        return {"ciphertext": b64(impl.ciphertext_to_bytes(c))}

    def verify_ciphertext(self, p: m.CiphertextParams) -> dict:
        pk = self._entry(p).public
        impl = registry.get(pk.scheme)
        return {"valid": bool(impl.verify_ciphertext(pk, impl.ciphertext_from_bytes(_b(p.ciphertext))))}

    def partial(self, p: m.RequestParams) -> dict:
        entry = self._entry(p)
        impl = registry.get(entry.share.scheme)
        if impl.id is SchemeId.KG20:
            raise UnsupportedSchemeError("KG20 shares come from frost_round2")
        request = self._request(impl, entry.public, p)
        share = impl.create_share(entry.share, request, system_rng())
        return {"share": b64(impl.partial_to_bytes(share))}

    def verify_share(self, p: m.ShareParams) -> dict:
        pk = self._entry(p).public
        impl = registry.get(pk.scheme)
        request = self._request(impl, pk, p)
        return {"valid": bool(impl.verify_share(pk, request, impl.partial_from_bytes(_b(p.share))))}

    def combine(self, p: m.CombineParams) -> dict:
        pk = self._entry(p).public
        impl = registry.get(pk.scheme)
        request = self._request(impl, pk, p)
        result = impl.combine(pk, request, [impl.partial_from_bytes(_b(s)) for s in p.shares])
        out = {"result": b64(impl.result_to_bytes(result, pk))}
        if pk.scheme is SchemeId.CKS05:
            out["attestation"] = b64(impl.attestation_to_bytes(result))
        return out

    def verify_result(self, p: m.ResultParams) -> dict:
        pk = self._entry(p).public
        impl = registry.get(pk.scheme)
        request = self._request(impl, pk, p)
        result = impl.result_from_bytes(_b(p.result), pk)
        if pk.scheme is SchemeId.CKS05:
            if p.attestation is None:
                raise MalformedError("CKS05 results are verified against their attestation")
            result = impl.attach_attestation(result, _b(p.attestation))
        return {"valid": bool(impl.verify_result(pk, request, result))}

    def frost_round1(self, p: m.KeyHandle) -> dict:
        entry = self._entry(p)
        if entry.share.scheme is not SchemeId.KG20:
            raise UnsupportedSchemeError("round one only exists for KG20")
        nonces, commitment = registry.get(SchemeId.KG20).round1(entry.share, system_rng())
        handle = secrets.token_hex(16)
        with self._lock:
            self._nonces[handle] = nonces
        return {"commitment": b64(encode_commitment(commitment)), "nonce_handle": handle}

    def frost_round2(self, p: m.FrostRound2Params) -> dict:
        entry = self._entry(p)
        impl = registry.get(SchemeId.KG20)
        request = self._request(impl, entry.public, p)
        with self._lock:
            nonces = self._nonces.pop(p.nonce_handle, None)
        if nonces is None:
            raise RpcFailure("nonce_reuse", "unknown or already used nonce handle", 409)
        share = impl.round2(entry.share, request, nonces)
        return {"share": b64(impl.partial_to_bytes(share))}
