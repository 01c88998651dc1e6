"""Executor for FROST (KG20) signing.

Round one: every signing-set member sends its nonce commitment to the other
members (over total-order broadcast when one is configured).  Round two: each
member broadcasts its response together with the signing package it used, so
that nodes outside the signing set can verify and finalize too.

With precomputed nonces the commitments are already known and the instance
starts directly in round two.  FROST is not robust: one invalid response or a
mismatching signing package makes the instance fail.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from ..rng import system_rng
from ..schemes import registry
from ..schemes.core import FrostNonceCommitment, FrostSigningRequest, KeyShare, PartialResult, SchemeId, b64, canonical_json, unb64
from ..schemes.errors import MalformedError, SigningSetError
from ..schemes.kg20 import FrostNonces, decode_commitment, encode_commitment, encode_commitment_list
from .base import Meter, ProtocolResult, ProtocolStateError, TriProtocol, _no_meter
from .messages import Channel, ProtocolMessage


@dataclass
class PrecomputedSlot:
    """Commitments of the whole signing set for one slot, plus own nonces if signing."""

    commitments: dict[int, FrostNonceCommitment]
    nonces: FrostNonces | None = None


def decode_package(data: bytes) -> tuple[FrostNonceCommitment, ...]:
    if len(data) % 66:
        raise MalformedError("signing package is not a list of commitments")
    return tuple(decode_commitment(data[i:i + 66]) for i in range(0, len(data), 66))


class FrostProtocol(TriProtocol):
    round_count = 2

    def __init__(self, instance_id: bytes, share: KeyShare, message: bytes, signing_set, *,
                 rng: random.Random | None = None, tob: bool = False,
                 precomputed: PrecomputedSlot | None = None, meter: Meter = _no_meter):
        if share.scheme is not SchemeId.KG20:
            raise ValueError("FROST executor needs a KG20 key share")
        super().__init__(instance_id, share, meter=meter)
        self.impl = registry.get(SchemeId.KG20)
        self.pk = share.public
        self.message = bytes(message)
        self.signing_set = tuple(sorted(signing_set))
        if len(self.signing_set) != self.params.quorum or len(set(self.signing_set)) != len(self.signing_set):
            raise SigningSetError(f"signing set must have exactly {self.params.quorum} distinct members")
        self.signer = self.index in self.signing_set
        self.rng = rng or system_rng()
        self.tob = tob
        self.precomputed = precomputed
        self.commitments: dict[int, FrostNonceCommitment] = {}
        self.request: FrostSigningRequest | None = None
        self.nonces: FrostNonces | None = None
        self.responses: dict[int, PartialResult] = {}
        self._seen: set[tuple[int, int]] = set()
        self._buffered: list[ProtocolMessage] = []
        self._failure: str | None = None
        if precomputed is not None:
            self.commitments = {i: precomputed.commitments[i] for i in self.signing_set if i in precomputed.commitments}
            if len(self.commitments) != len(self.signing_set):
                raise SigningSetError("precomputed slot lacks commitments for the signing set")
            self.nonces = precomputed.nonces
            if self.signer and self.nonces is None:
                raise SigningSetError("signing-set member has no precomputed nonces")
            self._build_request()

    # -- rounds -----------------------------------------------------------------

    def _do_round(self) -> ProtocolMessage | None:
        if self.current_round == 0 and self.precomputed is None:
            self.current_round = 1
            if not self.signer:
                return None
            self.meter("frost_round1")
            self.nonces, commitment = self.impl.round1(self.share, self.rng)
            return self._message(encode_commitment(commitment), Channel.TOB if self.tob else Channel.P2P,
                                 self.signing_set)
        if self.current_round >= 2:
            raise ProtocolStateError("FROST has only two rounds")
        if self.request is None:
            raise ProtocolStateError("signing package incomplete")
        self.current_round = 2
        if not self.signer:
            return None
        self.meter("frost_round2")
        partial = self.impl.round2(self.share, self.request, self.nonces)
        payload = canonical_json({
            "z": b64(self.impl.partial_to_bytes(partial)),
            "package": b64(encode_commitment_list(self.request.commitments)),
        })
        return self._message(payload)

    def _build_request(self) -> None:
        self.request = self.impl.signing_request(self.pk, self.message, self.commitments)

    # -- incoming -----------------------------------------------------------------

    def _update(self, m: ProtocolMessage) -> None:
        if self._failure is not None:
            return
        if m.sender not in self.signing_set or m.round not in (1, 2):
            self.counters.rejected += 1
            return
        if (m.sender, m.round) in self._seen:
            self.counters.duplicate += 1
            return
        self._seen.add((m.sender, m.round))
        if m.round == 1:
            self._on_commitment(m)
        elif self.request is None and self.signer:
            self._buffered.append(m)
        else:
            self._on_response(m)

    def _on_commitment(self, m: ProtocolMessage) -> None:
        if self.request is not None:
            return  # package already fixed (precomputed or adopted)
        try:
            c = decode_commitment(m.payload)
        except MalformedError:
            self.counters.rejected += 1
            return
        if c.index != m.sender:
            self.counters.rejected += 1
            return
        self.commitments[c.index] = c
        if len(self.commitments) == len(self.signing_set):
            self._build_request()
            pending, self._buffered = self._buffered, []
            for b in pending:
                self._on_response(b)

    def _on_response(self, m: ProtocolMessage) -> None:
        try:
            record = json.loads(m.payload)
            partial = self.impl.partial_from_bytes(unb64(record["z"]))
            package = decode_package(unb64(record["package"]))
        except (MalformedError, ValueError, KeyError, TypeError):
            self.counters.rejected += 1
            return self._fail(f"undecodable response from party {m.sender}")
        if partial.index != m.sender:
            return self._fail(f"party {m.sender} sent a response for index {partial.index}")
        if self.request is None:
            try:
                self.commitments = {c.index: c for c in package}
                self._build_request()
            except SigningSetError as exc:
                return self._fail(str(exc))
            if self.request.signing_set != self.signing_set:
                return self._fail("signing package does not match the signing set")
        elif package != self.request.commitments:
            return self._fail(f"party {m.sender} signed a different package")
        if m.sender != self.index:
            self.meter("verify_share")
            if not self.impl.verify_share(self.pk, self.request, partial):
                self.counters.rejected += 1
                return self._fail(f"invalid response from party {m.sender}")
        self.responses[m.sender] = partial

    def _fail(self, reason: str) -> None:
        self._failure = reason

    # -- predicates -----------------------------------------------------------------

    def is_ready_for_next_round(self) -> bool:
        if self.terminated or self._failure is not None:
            return False
        return self.signer and self.request is not None and self.current_round == 1

    def is_ready_to_finalize(self) -> bool:
        if self.terminated:
            return False
        if self._failure is not None:
            return True
        return len(self.responses) == len(self.signing_set) and (not self.signer or self.current_round == 2)

    def _finalize(self) -> ProtocolResult:
        if self._failure is not None:
            return ProtocolResult(False, error=f"FROST aborted: {self._failure}")
        self.meter("combine")
        sig = self.impl.combine(self.pk, self.request, self.responses.values())
        if not self.impl.verify_result(self.pk, self.request, sig):
            return ProtocolResult(False, error="aggregated signature failed verification")
        return ProtocolResult(True, sig, self.impl.result_to_bytes(sig, self.pk))
