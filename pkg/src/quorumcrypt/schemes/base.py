"""Behaviour common to all schemes: dealing Shamir shares, request binding,
share-set checks before combining, and codec helpers."""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from typing import Any

from ..groups.hashing import tagged_hash
from ..groups.lagrange import eval_polynomial
from .core import (
    KeyShare,
    PartialResult,
    PublicKeyMaterial,
    SchemeId,
    ThresholdParams,
    b64,
    canonical_json,
    unb64,
)
from .errors import DuplicateIndexError, InsufficientSharesError, MalformedError


def decode_element(group, data: bytes):
    try:
        return group.decode(data)
    except ValueError as exc:
        raise MalformedError(str(exc)) from exc


def decode_scalar(group, data: bytes) -> int:
    try:
        return group.decode_scalar(data)
    except ValueError as exc:
        raise MalformedError(str(exc)) from exc


def shamir_polynomial(secret: int, degree: int, modulus: int, rng: random.Random) -> list[int]:
    return [secret % modulus] + [rng.randrange(modulus) for _ in range(degree)]


def shamir_shares(coefficients: list[int], params: ThresholdParams, modulus: int) -> list[int]:
    return [eval_polynomial(coefficients, i, modulus) for i in params.indices]


class Scheme:
    """One threshold scheme.  Subclasses fill in the cryptography."""

    id: SchemeId
    tag: bytes

    # -- setup ---------------------------------------------------------------

    def deal(self, params: ThresholdParams, rng: random.Random, key_id: str = "default",
             **options) -> tuple[PublicKeyMaterial, list[KeyShare]]:
        raise NotImplementedError

    def check_share(self, share: KeyShare) -> bool:
        """Secret share matches the published verification key."""
        raise NotImplementedError

    # -- requests --------------------------------------------------------------

    def request_bytes(self, request: Any) -> bytes:
        raise NotImplementedError

    def request_label(self, request: Any) -> bytes:
        return b""

    def binding(self, pk: PublicKeyMaterial, request: Any) -> bytes:
        return tagged_hash(
            b"quorumcrypt/request-binding",
            self.id.value.encode(), pk.fingerprint, self.request_bytes(request), self.request_label(request),
        )

    # -- threshold operation -------------------------------------------------------

    def create_share(self, share: KeyShare, request: Any, rng: random.Random) -> PartialResult:
        raise NotImplementedError

    def verify_share(self, pk: PublicKeyMaterial, request: Any, partial: PartialResult) -> bool:
        self._check_partial_shape(pk, partial)
        if partial.binding != self.binding(pk, request):
            return False
        return self._verify_share(pk, request, partial)

    def _verify_share(self, pk, request, partial) -> bool:
        raise NotImplementedError

    def combine(self, pk: PublicKeyMaterial, request: Any, partials: Iterable[PartialResult]):
        chosen = self.select_shares(pk, partials)
        return self._combine(pk, request, chosen)

    def select_shares(self, pk: PublicKeyMaterial, partials: Iterable[PartialResult]) -> list[PartialResult]:
        partials = list(partials)
        indices = [p.index for p in partials]
        if len(set(indices)) != len(indices):
            raise DuplicateIndexError("two shares carry the same party index")
        if len(partials) < pk.params.quorum:
            raise InsufficientSharesError(f"need {pk.params.quorum} shares, got {len(partials)}")
        for p in partials:
            self._check_partial_shape(pk, p)
        return sorted(partials, key=lambda p: p.index)[: pk.params.quorum]

    def _combine(self, pk, request, partials: Sequence[PartialResult]):
        raise NotImplementedError

    def verify_result(self, pk: PublicKeyMaterial, request: Any, result: Any) -> bool:
        raise NotImplementedError

    def _check_partial_shape(self, pk: PublicKeyMaterial, partial: PartialResult) -> None:
        if partial.scheme is not self.id:
            raise MalformedError(f"{partial.scheme} share passed to {self.id}")
        if not 1 <= partial.index <= pk.params.n:
            raise MalformedError(f"share index {partial.index} outside 1..{pk.params.n}")

    # -- codecs ----------------------------------------------------------------------

    def public_to_dict(self, pk: PublicKeyMaterial) -> dict:
        raise NotImplementedError

    def public_from_dict(self, record: dict) -> PublicKeyMaterial:
        raise NotImplementedError

    def secret_to_text(self, secret: Any) -> str:
        raise NotImplementedError

    def secret_from_text(self, text: str) -> Any:
        raise NotImplementedError

    def value_to_bytes(self, value: Any) -> bytes:
        raise NotImplementedError

    def value_from_bytes(self, data: bytes, pk: PublicKeyMaterial | None = None) -> Any:
        raise NotImplementedError

    def proof_to_bytes(self, proof: Any) -> bytes:
        return b""

    def proof_from_bytes(self, data: bytes) -> Any:
        return None

    def partial_to_bytes(self, partial: PartialResult) -> bytes:
        return canonical_json({
            "scheme": self.id.value,
            "binding": b64(partial.binding),
            "index": partial.index,
            "value": b64(self.value_to_bytes(partial.value)),
            "proof": b64(self.proof_to_bytes(partial.proof)) if partial.proof is not None else None,
        })

    def partial_from_bytes(self, data: bytes) -> PartialResult:
        import json

        try:
            record = json.loads(data)
            if record["scheme"] != self.id.value:
                raise MalformedError("share for another scheme")
            index = record["index"]
            if not isinstance(index, int) or index < 1:
                raise MalformedError("bad share index")
            proof = record.get("proof")
            return PartialResult(
                self.id, unb64(record["binding"]), index,
                self.value_from_bytes(unb64(record["value"])),
                self.proof_from_bytes(unb64(proof)) if proof is not None else None,
            )
        except MalformedError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedError(f"undecodable {self.id.value} share") from exc

    def result_to_bytes(self, result: Any, pk: PublicKeyMaterial | None = None) -> bytes:
        raise NotImplementedError

    def result_from_bytes(self, data: bytes, pk: PublicKeyMaterial | None = None) -> Any:
        raise NotImplementedError

    # helpers for subclasses

    def _base_public_dict(self, pk: PublicKeyMaterial) -> dict:
        return {
            "scheme": self.id.value,
            "key_id": pk.key_id,
            "params": {"n": pk.params.n, "t": pk.params.t},
            "group": self.id.group,
        }

    @staticmethod
    def _params_from(record: dict) -> ThresholdParams:
        try:
            return ThresholdParams(int(record["params"]["n"]), int(record["params"]["t"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedError("bad threshold parameters") from exc


class DlogScheme(Scheme):
    """Schemes whose secret is a scalar shared by Shamir and whose verification
    keys are ``x_i * base`` in a prime-order group."""

    group = None  # group holding the verification keys

    def vk_base(self):
        return self.group.generator()

    def _deal_scalars(self, params: ThresholdParams, rng: random.Random):
        q = self.group.order
        secret = rng.randrange(1, q)
        coeffs = shamir_polynomial(secret, params.t, q, rng)
        return secret, shamir_shares(coeffs, params, q)

    def check_share(self, share: KeyShare) -> bool:
        return share.public.verification_key(share.index) == self.vk_base() * share.secret

    def secret_to_text(self, secret: int) -> str:
        return b64(self.group.encode_scalar(secret))

    def secret_from_text(self, text: str) -> int:
        return decode_scalar(self.group, unb64(text))

    def _decode_vks(self, group, record: dict, params: ThresholdParams) -> tuple:
        vks = tuple(decode_element(group, unb64(v)) for v in record["verification_keys"])
        if len(vks) != params.n:
            raise MalformedError("verification key count does not match n")
        return vks
