"""Trusted dealer: writes key files for one scheme, or pairwise MAC keys."""

from __future__ import annotations

from pathlib import Path

from ..network.auth import deal_auth_keys, write_auth_files
from ..rng import make_rng
from ..schemes import deal_keys
from ..schemes.core import SchemeId, ThresholdParams
from ..schemes.keyfile import write_key_files

AUTH = "AUTH"


def parse_seed(seed: str | None) -> bytes | None:
    if seed is None:
        return None
    try:
        return bytes.fromhex(seed)
    except ValueError:
        raise ValueError("seed must be hex") from None


def deal(scheme: str, n: int, t: int, out_dir: str | Path, seed: str | None = None, *, key_id: str = "default",
         rsa_bits: int | None = None) -> list[Path]:
    params = ThresholdParams(n, t)  # validates n and t for every kind of key
    rng = make_rng(parse_seed(seed))
    if scheme.upper() == AUTH:
        return write_auth_files(out_dir, deal_auth_keys(n, rng), key_id)
    scheme_id = SchemeId.parse(scheme)
    options = {"modulus_bits": rsa_bits} if rsa_bits and scheme_id is SchemeId.SH00 else {}
    pk, shares = deal_keys(scheme_id, params, rng, key_id=key_id, **options)
    return write_key_files(out_dir, pk, shares)
