"""Shoup's practical threshold RSA signatures.

The dealer shares ``d = e^-1 mod p'q'`` with a polynomial over ``Z_{p'q'}``.
Party i signs with ``x_i = x^(2*Delta*s_i)`` where ``x`` is the full-domain
hash of the message and ``Delta = n!``, proving correctness against
``v_i = v^s_i``.  Combining raises shares to ``2*Delta*lambda_i(0)`` (an
integer), which yields ``w`` with ``w^e = x^(4*Delta^2)``; since
``gcd(4*Delta^2, e) = 1`` an extended-gcd step recovers ``x^d``.
"""

from __future__ import annotations

import hashlib
import random
from math import factorial, gcd

import gmpy2

from ..groups.hashing import expand, frame
from ..groups.lagrange import integer_lagrange_coefficient
from ..groups.rsa import ALLOWED_BITS, RsaModulus, generate_modulus
from .base import Scheme, shamir_polynomial, shamir_shares
from .core import (
    KeyShare,
    PartialResult,
    PublicKeyMaterial,
    RsaSignature,
    SchemeId,
    ThresholdParams,
    b64,
    bytes_to_int,
    int_to_bytes,
    unb64,
)
from .errors import MalformedError

TAG = b"quorumcrypt/SH00"
HASH_NAME = "sha512-ctr-fdh"
CHALLENGE_BITS = 128


def full_domain_hash(modulus: RsaModulus, message: bytes) -> int:
    """Counter-mode SHA-512 expansion to the modulus width plus 128 bits, reduced mod N."""
    data = expand(TAG + b"/fdh", message, modulus.byte_length + 16)
    return int.from_bytes(data, "big") % modulus.n_modulus


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    g, s, t = gmpy2.gcdext(a, b)
    return int(g), int(s), int(t)


class Sh00(Scheme):
    id = SchemeId.SH00
    tag = TAG
    default_bits = 2048

    def deal(self, params: ThresholdParams, rng: random.Random, key_id: str = "default",
             modulus_bits: int | None = None, public_exponent: int = 65537, **options):
        bits = modulus_bits or self.default_bits
        if public_exponent <= params.n:
            raise ValueError("public exponent must exceed the number of parties")
        modulus, trap = generate_modulus(bits, rng, public_exponent)
        n_mod, m = modulus.n_modulus, trap.m
        d = int(gmpy2.invert(public_exponent, m))
        secrets_ = shamir_shares(shamir_polynomial(d, params.t, m, rng), params, m)
        v = pow(rng.randrange(2, n_mod - 1), 2, n_mod)
        vks = tuple(int(gmpy2.powmod(v, s, n_mod)) for s in secrets_)
        pk = PublicKeyMaterial(
            self.id, params, modulus, vks,
            {"v": v, "delta": factorial(params.n), "hash": HASH_NAME}, key_id,
        )
        return pk, [KeyShare(self.id, i, s, pk) for i, s in zip(params.indices, secrets_)]

    def check_share(self, share: KeyShare) -> bool:
        pk = share.public
        return int(gmpy2.powmod(pk.aux["v"], share.secret, pk.group_public_key.n_modulus)) == pk.verification_key(share.index)

    def request_bytes(self, message: bytes) -> bytes:
        return bytes(message)

    def _challenge(self, pk, binding, x_tilde, vi, xi_sq, v_commit, x_commit) -> int:
        size = pk.group_public_key.byte_length
        digest = hashlib.sha512(frame(
            TAG + b"/proof", binding, *(int_to_bytes(val, size) for val in
                                         (pk.aux["v"], x_tilde, vi, xi_sq, v_commit, x_commit)),
        )).digest()
        return int.from_bytes(digest, "big") >> (512 - CHALLENGE_BITS)

    def create_share(self, share: KeyShare, message: bytes, rng: random.Random) -> PartialResult:
        pk = share.public
        n_mod = pk.group_public_key.n_modulus
        delta = pk.aux["delta"]
        x = full_domain_hash(pk.group_public_key, message)
        xi = int(gmpy2.powmod(x, 2 * delta * share.secret, n_mod))
        x_tilde = int(gmpy2.powmod(x, 4 * delta, n_mod))
        r = rng.getrandbits(n_mod.bit_length() + 2 * CHALLENGE_BITS)
        binding = self.binding(pk, message)
        c = self._challenge(pk, binding, x_tilde, pk.verification_key(share.index), xi * xi % n_mod,
                            int(gmpy2.powmod(pk.aux["v"], r, n_mod)), int(gmpy2.powmod(x_tilde, r, n_mod)))
        z = share.secret * c + r
        return PartialResult(self.id, binding, share.index, xi, (c, z))

    def _verify_share(self, pk, message: bytes, p: PartialResult) -> bool:
        if p.proof is None:
            return False
        n_mod = pk.group_public_key.n_modulus
        xi = p.value
        if not 0 < xi < n_mod or gcd(xi, n_mod) != 1:
            return False
        c, z = p.proof
        if c < 0 or z < 0:
            return False
        x = full_domain_hash(pk.group_public_key, message)
        x_tilde = int(gmpy2.powmod(x, 4 * pk.aux["delta"], n_mod))
        vi = pk.verification_key(p.index)
        if gcd(vi, n_mod) != 1:
            return False
        v_commit = int(gmpy2.powmod(pk.aux["v"], z, n_mod) * gmpy2.powmod(vi, -c, n_mod) % n_mod)
        x_commit = int(gmpy2.powmod(x_tilde, z, n_mod) * gmpy2.powmod(xi, -2 * c, n_mod) % n_mod)
        return c == self._challenge(pk, p.binding, x_tilde, vi, xi * xi % n_mod, v_commit, x_commit)

    def _combine(self, pk, message: bytes, partials) -> RsaSignature:
        modulus = pk.group_public_key
        n_mod, e = modulus.n_modulus, modulus.public_exponent
        delta = pk.aux["delta"]
        subset = [p.index for p in partials]
        w = gmpy2.mpz(1)
        for p in partials:
            lam = integer_lagrange_coefficient(subset, p.index, pk.params.n)
            w = w * gmpy2.powmod(p.value, 2 * lam, n_mod) % n_mod
        e_prime = 4 * delta * delta
        g, a, b = _xgcd(e_prime, e)
        if g != 1:
            raise ArithmeticError("public exponent shares a factor with 4*Delta^2")  # pragma: no cover
        x = full_domain_hash(modulus, message)
        y = gmpy2.powmod(w, a, n_mod) * gmpy2.powmod(x, b, n_mod) % n_mod
        return RsaSignature(int(y))

    def verify_result(self, pk, message: bytes, result) -> bool:
        if not isinstance(result, RsaSignature):
            return False
        modulus = pk.group_public_key
        return pow(result.value, modulus.public_exponent, modulus.n_modulus) == full_domain_hash(modulus, message)

    # -- codecs ------------------------------------------------------------------

    def public_to_dict(self, pk):
        modulus = pk.group_public_key
        size = modulus.byte_length
        d = self._base_public_dict(pk)
        d["public_key"] = {
            "modulus": b64(int_to_bytes(modulus.n_modulus, size)),
            "bit_length": modulus.bit_length,
            "public_exponent": modulus.public_exponent,
        }
        d["verification_keys"] = [b64(int_to_bytes(v, size)) for v in pk.verification_keys]
        d["aux"] = {"v": b64(int_to_bytes(pk.aux["v"], size)), "delta": b64(int_to_bytes(pk.aux["delta"])),
                    "hash": pk.aux["hash"]}
        return d

    def public_from_dict(self, record):
        params = self._params_from(record)
        try:
            pub = record["public_key"]
            bits = int(pub["bit_length"])
            if bits not in ALLOWED_BITS:
                raise MalformedError(f"unsupported modulus size {bits}")
            modulus = RsaModulus(bytes_to_int(unb64(pub["modulus"])), bits, int(pub["public_exponent"]))
            vks = tuple(bytes_to_int(unb64(v)) for v in record["verification_keys"])
            if len(vks) != params.n:
                raise MalformedError("verification key count does not match n")
            aux = record["aux"]
            if aux.get("hash") != HASH_NAME:
                raise MalformedError(f"unsupported message hash {aux.get('hash')!r}")
            delta = bytes_to_int(unb64(aux["delta"]))
            if delta != factorial(params.n):
                raise MalformedError("Delta must equal n!")
            return PublicKeyMaterial(self.id, params, modulus, vks,
                                     {"v": bytes_to_int(unb64(aux["v"])), "delta": delta, "hash": HASH_NAME},
                                     record.get("key_id", "default"))
        except MalformedError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedError(f"bad SH00 public key: {exc}") from exc

    def secret_to_text(self, secret: int) -> str:
        return b64(int_to_bytes(secret))

    def secret_from_text(self, text: str) -> int:
        return bytes_to_int(unb64(text))

    def value_to_bytes(self, value: int) -> bytes:
        return int_to_bytes(value)

    def value_from_bytes(self, data, pk=None) -> int:
        return bytes_to_int(data)

    def proof_to_bytes(self, proof) -> bytes:
        c, z = proof
        cb, zb = int_to_bytes(c), int_to_bytes(z)
        return len(cb).to_bytes(2, "big") + cb + zb

    def proof_from_bytes(self, data: bytes):
        if len(data) < 3:
            raise MalformedError("bad SH00 proof")
        size = int.from_bytes(data[:2], "big")
        if len(data) < 2 + size + 1:
            raise MalformedError("bad SH00 proof")
        return bytes_to_int(data[2:2 + size]), bytes_to_int(data[2 + size:])

    def result_to_bytes(self, result: RsaSignature, pk: PublicKeyMaterial | None = None) -> bytes:
        if pk is None:
            return int_to_bytes(result.value)
        return result.value.to_bytes(pk.group_public_key.byte_length, "big")

    def result_from_bytes(self, data: bytes, pk=None) -> RsaSignature:
        return RsaSignature(bytes_to_int(data))
