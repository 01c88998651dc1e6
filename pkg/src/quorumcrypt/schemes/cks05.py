"""Diffie-Hellman threshold coin tossing (Cachin-Kursawe-Shoup) on edwards25519.

The coin named ``C`` has value ``H(x * Hg(C))``.  Each share ``x_i * Hg(C)``
carries a DLEQ proof against ``x_i * G``.
"""

from __future__ import annotations

import json
import random

from ..groups.edwards import ED25519
from ..groups.hashing import tagged_hash
from ..groups.lagrange import lagrange_coefficients
from . import dleq
from .base import DlogScheme, decode_element
from .core import CoinValue, KeyShare, PartialResult, PublicKeyMaterial, SchemeId, ThresholdParams, b64, canonical_json, unb64
from .errors import MalformedError

TAG = b"quorumcrypt/CKS05"
COIN_SIZE = 32


def coin_base(name: bytes):
    return ED25519.hash_to_group(TAG + b"/coin", name)


def coin_value_of(element) -> bytes:
    return tagged_hash(TAG + b"/value", element.encode(), size=COIN_SIZE)


class Cks05(DlogScheme):
    id = SchemeId.CKS05
    tag = TAG
    group = ED25519

    def deal(self, params: ThresholdParams, rng: random.Random, key_id: str = "default", **options):
        secret, xs = self._deal_scalars(params, rng)
        g = self.group.generator()
        pk = PublicKeyMaterial(self.id, params, g * secret, tuple(g * x for x in xs), {}, key_id)
        return pk, [KeyShare(self.id, i, x, pk) for i, x in zip(params.indices, xs)]

    def request_bytes(self, name: bytes) -> bytes:
        return bytes(name)

    def create_share(self, share: KeyShare, name: bytes, rng: random.Random) -> PartialResult:
        pk = share.public
        base = coin_base(name)
        value = base * share.secret
        binding = self.binding(pk, name)
        proof = dleq.prove(self.group, TAG, binding, share.secret, self.group.generator(),
                           pk.verification_key(share.index), base, value, rng)
        return PartialResult(self.id, binding, share.index, value, proof)

    def _verify_share(self, pk, name: bytes, p: PartialResult) -> bool:
        if p.proof is None:
            return False
        return dleq.verify(self.group, TAG, p.binding, self.group.generator(),
                           pk.verification_key(p.index), coin_base(name), p.value, p.proof)

    def _combine(self, pk, name: bytes, partials) -> CoinValue:
        lam = lagrange_coefficients([p.index for p in partials], self.group.order)
        element = self.group.identity()
        for p in partials:
            element = element + p.value * lam[p.index]
        return CoinValue(coin_value_of(element), element, tuple(partials))

    def verify_result(self, pk, name: bytes, result) -> bool:
        """Re-check the contributing shares' proofs and the interpolation."""
        if not isinstance(result, CoinValue) or result.element is None:
            return False
        if result.value != coin_value_of(result.element):
            return False
        shares = list(result.shares)
        if len({p.index for p in shares}) != len(shares) or len(shares) < pk.params.quorum:
            return False
        if not all(self.verify_share(pk, name, p) for p in shares):
            return False
        return self._combine(pk, name, shares[: pk.params.quorum]).element == result.element

    def public_to_dict(self, pk):
        d = self._base_public_dict(pk)
        d["public_key"] = b64(pk.group_public_key.encode())
        d["verification_keys"] = [b64(v.encode()) for v in pk.verification_keys]
        d["aux"] = {}
        return d

    def public_from_dict(self, record):
        params = self._params_from(record)
        try:
            return PublicKeyMaterial(
                self.id, params, decode_element(self.group, unb64(record["public_key"])),
                self._decode_vks(self.group, record, params), {}, record.get("key_id", "default"),
            )
        except KeyError as exc:
            raise MalformedError(f"missing field {exc}") from exc

    def value_to_bytes(self, value) -> bytes:
        return value.encode()

    def value_from_bytes(self, data, pk=None):
        return decode_element(self.group, data)

    def proof_to_bytes(self, proof) -> bytes:
        return dleq.encode(self.group, proof)

    def proof_from_bytes(self, data):
        try:
            return dleq.decode(self.group, data)
        except ValueError as exc:
            raise MalformedError(str(exc)) from exc

    def result_to_bytes(self, result: CoinValue, pk=None) -> bytes:
        return result.value

    def result_from_bytes(self, data: bytes, pk=None) -> CoinValue:
        if len(data) != COIN_SIZE:
            raise MalformedError("coin values are 32 bytes")
        return CoinValue(bytes(data))

    def attestation_to_bytes(self, result: CoinValue) -> bytes:
        """Combined element and contributing shares, enough for verify_result."""
        return canonical_json({
            "element": b64(result.element.encode()),
            "shares": [b64(self.partial_to_bytes(p)) for p in result.shares],
        })

    def attach_attestation(self, result: CoinValue, data: bytes) -> CoinValue:
        try:
            record = json.loads(data)
            element = decode_element(self.group, unb64(record["element"]))
            shares = tuple(self.partial_from_bytes(unb64(s)) for s in record["shares"])
        except MalformedError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedError("undecodable coin attestation") from exc
        return CoinValue(result.value, element, shares)
