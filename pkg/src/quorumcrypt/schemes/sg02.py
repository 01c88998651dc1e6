"""Shoup-Gennaro TDH2 threshold encryption over edwards25519, used as a KEM
for ChaCha20-Poly1305.

Ciphertext: ``u = r*G``, ``ubar = r*Gbar`` and a proof ``(e, f)`` that both
share the exponent ``r``, bound to the payload and label.  The payload key is
derived from ``r*Y``.  Decryption shares are ``x_i*u`` with a DLEQ proof
against the party's verification key ``x_i*G``.
"""

from __future__ import annotations

import json
import random

from ..groups.edwards import ED25519
from ..groups.hashing import hash_to_scalar
from ..groups.lagrange import lagrange_coefficients
from . import dleq, symmetric
from .base import DlogScheme, decode_element, decode_scalar
from .core import (
    Ciphertext,
    KeyShare,
    PartialResult,
    PublicKeyMaterial,
    SchemeId,
    ThresholdParams,
    b64,
    canonical_json,
    unb64,
)
from .errors import InvalidCiphertextError, MalformedError

TAG = b"quorumcrypt/SG02"


class Sg02(DlogScheme):
    id = SchemeId.SG02
    tag = TAG
    group = ED25519

    def second_generator(self):
        return self.group.hash_to_group(TAG, b"second generator")

    def deal(self, params: ThresholdParams, rng: random.Random, key_id: str = "default", **options):
        secret, xs = self._deal_scalars(params, rng)
        g = self.group.generator()
        pk = PublicKeyMaterial(
            self.id, params, g * secret, tuple(g * x for x in xs),
            {"second_generator": self.second_generator()}, key_id,
        )
        return pk, [KeyShare(self.id, i, x, pk) for i, x in zip(params.indices, xs)]

    # -- encryption ------------------------------------------------------------

    def _proof_challenge(self, pk, label, payload, u, w, ubar, wbar) -> int:
        return hash_to_scalar(
            self.group.order, TAG + b"/ciphertext", pk.fingerprint, label, payload,
            u.encode(), w.encode(), ubar.encode(), wbar.encode(),
        )

    def encrypt(self, pk: PublicKeyMaterial, label: bytes, plaintext: bytes, rng: random.Random) -> Ciphertext:
        q = self.group.order
        g, gbar = self.group.generator(), pk.aux["second_generator"]
        r = rng.randrange(1, q)
        s = rng.randrange(1, q)
        u, ubar = g * r, gbar * r
        key = symmetric.derive_key(TAG, (pk.group_public_key * r).encode())
        nonce = symmetric.derive_nonce(TAG, u.encode() + ubar.encode())
        payload = symmetric.seal(key, nonce, plaintext, label)
        e = self._proof_challenge(pk, label, payload, u, g * s, ubar, gbar * s)
        f = (s + r * e) % q
        return Ciphertext(self.id, bytes(label), (u, ubar), (e, f), payload)

    def verify_ciphertext(self, pk: PublicKeyMaterial, c: Ciphertext) -> bool:
        if c.scheme is not self.id or len(c.encapsulation) != 2 or len(c.proof) != 2:
            raise MalformedError("not an SG02 ciphertext")
        (u, ubar), (e, f) = c.encapsulation, c.proof
        g, gbar = self.group.generator(), pk.aux["second_generator"]
        w = g * f - u * e
        wbar = gbar * f - ubar * e
        return e == self._proof_challenge(pk, c.label, c.payload, u, w, ubar, wbar)

    # -- threshold decryption ------------------------------------------------------

    def request_bytes(self, c: Ciphertext) -> bytes:
        return self.ciphertext_to_bytes(c)

    def request_label(self, c: Ciphertext) -> bytes:
        return c.label

    def create_share(self, share: KeyShare, c: Ciphertext, rng: random.Random) -> PartialResult:
        pk = share.public
        if not self.verify_ciphertext(pk, c):
            raise InvalidCiphertextError("refusing to release a share for an invalid ciphertext")
        u = c.encapsulation[0]
        ui = u * share.secret
        binding = self.binding(pk, c)
        proof = dleq.prove(self.group, TAG, binding, share.secret,
                           self.group.generator(), pk.verification_key(share.index), u, ui, rng)
        return PartialResult(self.id, binding, share.index, ui, proof)

    def _verify_share(self, pk, c: Ciphertext, p: PartialResult) -> bool:
        if p.proof is None:
            return False
        return dleq.verify(self.group, TAG, p.binding, self.group.generator(),
                           pk.verification_key(p.index), c.encapsulation[0], p.value, p.proof)

    def _combine(self, pk, c: Ciphertext, partials) -> bytes:
        lam = lagrange_coefficients([p.index for p in partials], self.group.order)
        shared = self.group.identity()
        for p in partials:
            shared = shared + p.value * lam[p.index]
        u, ubar = c.encapsulation
        key = symmetric.derive_key(TAG, shared.encode())
        nonce = symmetric.derive_nonce(TAG, u.encode() + ubar.encode())
        return symmetric.open_(key, nonce, c.payload, c.label)

    def verify_result(self, pk, c, result) -> bool:
        # authenticated decryption inside combine is the result check
        return isinstance(result, bytes)

    # -- codecs -------------------------------------------------------------------------

    def public_to_dict(self, pk):
        d = self._base_public_dict(pk)
        d["public_key"] = b64(pk.group_public_key.encode())
        d["verification_keys"] = [b64(v.encode()) for v in pk.verification_keys]
        d["aux"] = {"second_generator": b64(pk.aux["second_generator"].encode())}
        return d

    def public_from_dict(self, record):
        params = self._params_from(record)
        try:
            return PublicKeyMaterial(
                self.id, params, decode_element(self.group, unb64(record["public_key"])),
                self._decode_vks(self.group, record, params),
                {"second_generator": decode_element(self.group, unb64(record["aux"]["second_generator"]))},
                record.get("key_id", "default"),
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

    def ciphertext_to_bytes(self, c: Ciphertext) -> bytes:
        return canonical_json({
            "scheme": self.id.value,
            "label": b64(c.label),
            "encapsulation": [b64(x.encode()) for x in c.encapsulation],
            "proof": [b64(self.group.encode_scalar(x)) for x in c.proof],
            "payload": b64(c.payload),
        })

    def ciphertext_from_bytes(self, data: bytes) -> Ciphertext:
        try:
            record = json.loads(data)
            if record["scheme"] != self.id.value:
                raise MalformedError("ciphertext for another scheme")
            enc = tuple(decode_element(self.group, unb64(x)) for x in record["encapsulation"])
            proof = tuple(decode_scalar(self.group, unb64(x)) for x in record["proof"])
            if len(enc) != 2 or len(proof) != 2:
                raise MalformedError("SG02 ciphertexts carry two elements and two scalars")
            return Ciphertext(self.id, unb64(record["label"]), enc, proof, unb64(record["payload"]))
        except MalformedError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedError("undecodable SG02 ciphertext") from exc

    def result_to_bytes(self, result: bytes, pk=None) -> bytes:
        return result

    def result_from_bytes(self, data: bytes, pk=None) -> bytes:
        return data
