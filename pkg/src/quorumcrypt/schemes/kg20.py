"""FROST threshold Schnorr signatures (Komlo-Goldberg) on edwards25519.

Round one publishes nonce commitments ``(D_i, E_i)``; round two answers with
``z_i = d_i + e_i*rho_i + lambda_i*x_i*c``.  Aggregation gives ``(R, z)``
that verifies as an ordinary Schnorr signature ``z*G == R + c*Y`` with
``c = H(R, Y, m)``.  FROST is not robust: a bad response aborts signing.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field

from ..groups.edwards import ED25519
from ..groups.hashing import hash_to_scalar
from ..groups.lagrange import lagrange_coefficients
from .base import DlogScheme, decode_element, decode_scalar
from .core import (
    FrostNonceCommitment,
    FrostSigningRequest,
    KeyShare,
    PartialResult,
    PublicKeyMaterial,
    SchemeId,
    SchnorrSignature,
    ThresholdParams,
    b64,
    unb64,
)
from .errors import DuplicateIndexError, InsufficientSharesError, MalformedError, NonceReuseError, SigningSetError

TAG = b"quorumcrypt/KG20"
G = ED25519


def encode_commitment(c: FrostNonceCommitment) -> bytes:
    return c.index.to_bytes(2, "big") + c.hiding.encode() + c.binding.encode()


def decode_commitment(data: bytes) -> FrostNonceCommitment:
    if len(data) != 66:
        raise MalformedError("FROST commitments are 66 bytes")
    return FrostNonceCommitment(int.from_bytes(data[:2], "big"), decode_element(G, data[2:34]),
                                decode_element(G, data[34:]))


def encode_commitment_list(commitments) -> bytes:
    return b"".join(encode_commitment(c) for c in commitments)


def binding_factor(index: int, message: bytes, commitments) -> int:
    return hash_to_scalar(G.order, TAG + b"/rho", index.to_bytes(2, "big"), message, encode_commitment_list(commitments))


def group_commitment(message: bytes, commitments):
    r = G.identity()
    for c in commitments:
        r = r + c.hiding + c.binding * binding_factor(c.index, message, commitments)
    return r


def challenge(commitment, public_key, message: bytes) -> int:
    return hash_to_scalar(G.order, TAG + b"/challenge", commitment.encode(), public_key.encode(), message)


def schnorr_verify(public_key, message: bytes, sig: SchnorrSignature) -> bool:
    return G.generator() * sig.response == sig.commitment + public_key * challenge(sig.commitment, public_key, message)


@dataclass(eq=False)
class FrostNonces:
    """A secret nonce pair.  It can be used for exactly one signature share."""

    index: int
    hiding: int = field(repr=False)
    binding: int = field(repr=False)
    commitment: FrostNonceCommitment = None
    consumed: bool = False
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def take(self) -> tuple[int, int]:
        with self._lock:
            if self.consumed:
                raise NonceReuseError("FROST nonces have already been used")
            self.consumed = True
            pair = (self.hiding, self.binding)
            self.hiding = self.binding = 0
            return pair


class FrostNonceStore:
    """Precomputed nonces of one party, addressed by slot number."""

    def __init__(self, index: int):
        self.index = index
        self._nonces: dict[int, FrostNonces] = {}
        self._consumed: set[int] = set()
        self._next_slot = 0
        self._lock = threading.Lock()

    def generate(self, count: int, rng: random.Random) -> list[tuple[int, FrostNonceCommitment]]:
        out = []
        with self._lock:
            for _ in range(count):
                nonces, commitment = round1_nonces(self.index, rng)
                slot = self._next_slot
                self._next_slot += 1
                self._nonces[slot] = nonces
                out.append((slot, commitment))
        return out

    def take(self, slot: int) -> FrostNonces:
        with self._lock:
            if slot in self._consumed:
                raise NonceReuseError(f"nonce slot {slot} was already consumed")
            nonces = self._nonces.pop(slot, None)
            if nonces is None:
                raise KeyError(f"no precomputed nonce in slot {slot}")
            self._consumed.add(slot)
            return nonces

    def available(self) -> int:
        with self._lock:
            return len(self._nonces)


def round1_nonces(index: int, rng: random.Random) -> tuple[FrostNonces, FrostNonceCommitment]:
    d = rng.randrange(1, G.order)
    e = rng.randrange(1, G.order)
    commitment = FrostNonceCommitment(index, G.base_mul(d), G.base_mul(e))
    return FrostNonces(index, d, e, commitment), commitment


class Kg20(DlogScheme):
    id = SchemeId.KG20
    tag = TAG
    group = G

    def deal(self, params: ThresholdParams, rng: random.Random, key_id: str = "default", **options):
        secret, xs = self._deal_scalars(params, rng)
        g = G.generator()
        pk = PublicKeyMaterial(self.id, params, g * secret, tuple(g * x for x in xs), {}, key_id)
        return pk, [KeyShare(self.id, i, x, pk) for i, x in zip(params.indices, xs)]

    @staticmethod
    def default_signing_set(params: ThresholdParams, live: set[int] | None = None) -> tuple[int, ...]:
        """Lowest t+1 indices among the live parties."""
        candidates = sorted(live) if live is not None else list(params.indices)
        if len(candidates) < params.quorum:
            raise SigningSetError("not enough live parties for a signing set")
        return tuple(candidates[: params.quorum])

    def round1(self, share: KeyShare, rng: random.Random) -> tuple[FrostNonces, FrostNonceCommitment]:
        return round1_nonces(share.index, rng)

    def signing_request(self, pk: PublicKeyMaterial, message: bytes, commitments) -> FrostSigningRequest:
        items = sorted(commitments.values() if isinstance(commitments, dict) else commitments, key=lambda c: c.index)
        indices = [c.index for c in items]
        if len(set(indices)) != len(indices):
            raise SigningSetError("duplicate commitment index")
        if len(items) != pk.params.quorum:
            raise SigningSetError(f"signing set must have exactly {pk.params.quorum} members")
        if not all(1 <= i <= pk.params.n for i in indices):
            raise SigningSetError("signing set index outside 1..n")
        return FrostSigningRequest(bytes(message), tuple(items))

    def request_bytes(self, request: FrostSigningRequest) -> bytes:
        return len(request.message).to_bytes(8, "big") + request.message + encode_commitment_list(request.commitments)

    def round2(self, share: KeyShare, request: FrostSigningRequest, nonces: FrostNonces) -> PartialResult:
        pk = share.public
        if share.index not in request.signing_set:
            raise SigningSetError(f"party {share.index} is not in the signing set")
        own = next(c for c in request.commitments if c.index == share.index)
        if nonces.commitment is not None and own != nonces.commitment:
            raise SigningSetError("own commitment in the signing package does not match the nonces")
        d, e = nonces.take()
        msg, comms = request.message, request.commitments
        rho = binding_factor(share.index, msg, comms)
        r = group_commitment(msg, comms)
        c = challenge(r, pk.group_public_key, msg)
        lam = lagrange_coefficients(request.signing_set, G.order)[share.index]
        z = (d + e * rho + lam * share.secret * c) % G.order
        return PartialResult(self.id, self.binding(pk, request), share.index, z)

    def create_share(self, share: KeyShare, request: FrostSigningRequest, rng=None, nonces: FrostNonces | None = None):
        if nonces is None:
            raise TypeError("FROST shares need the party's round-one nonces")
        return self.round2(share, request, nonces)

    def _verify_share(self, pk, request: FrostSigningRequest, p: PartialResult) -> bool:
        own = [c for c in request.commitments if c.index == p.index]
        if not own or not isinstance(p.value, int) or not 0 <= p.value < G.order:
            return False
        msg, comms = request.message, request.commitments
        rho = binding_factor(p.index, msg, comms)
        c = challenge(group_commitment(msg, comms), pk.group_public_key, msg)
        lam = lagrange_coefficients(request.signing_set, G.order)[p.index]
        expected = own[0].hiding + own[0].binding * rho + pk.verification_key(p.index) * (c * lam % G.order)
        return G.base_mul(p.value) == expected

    def combine(self, pk: PublicKeyMaterial, request: FrostSigningRequest, partials) -> SchnorrSignature:
        partials = list(partials)
        indices = [p.index for p in partials]
        if len(set(indices)) != len(indices):
            raise DuplicateIndexError("two shares carry the same party index")
        missing = set(request.signing_set) - set(indices)
        if len(partials) < pk.params.quorum or missing:
            raise InsufficientSharesError(f"missing responses from signing-set members {sorted(missing)}")
        chosen = [p for p in partials if p.index in request.signing_set]
        z = sum(p.value for p in chosen) % G.order
        return SchnorrSignature(group_commitment(request.message, request.commitments), z)

    def verify_result(self, pk, request, result) -> bool:
        message = request.message if isinstance(request, FrostSigningRequest) else request
        return isinstance(result, SchnorrSignature) and schnorr_verify(pk.group_public_key, message, result)

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
                self.id, params, decode_element(G, unb64(record["public_key"])),
                self._decode_vks(G, record, params), {}, record.get("key_id", "default"),
            )
        except KeyError as exc:
            raise MalformedError(f"missing field {exc}") from exc

    def value_to_bytes(self, value: int) -> bytes:
        return G.encode_scalar(value)

    def value_from_bytes(self, data, pk=None) -> int:
        return decode_scalar(G, data)

    def result_to_bytes(self, result: SchnorrSignature, pk=None) -> bytes:
        return result.commitment.encode() + G.encode_scalar(result.response)

    def result_from_bytes(self, data: bytes, pk=None) -> SchnorrSignature:
        if len(data) != 64:
            raise MalformedError("Schnorr signatures are 64 bytes")
        return SchnorrSignature(decode_element(G, data[:32]), decode_scalar(G, data[32:]))
