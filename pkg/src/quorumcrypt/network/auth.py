"""Pairwise MAC keys for end-to-end authentication.

The dealer derives ``K_ij = K_ji`` from one master secret and writes each
party only the keys it shares with the others.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from ..groups.hashing import tagged_hash
from ..rng import make_rng
from ..schemes.core import b64, canonical_json, unb64
from ..schemes.errors import MalformedError
from ..schemes.keyfile import FORMAT


def auth_filename(index: int, key_id: str = "default") -> str:
    return f"AUTH-{key_id}.party-{index}.json"


def pair_key(master: bytes, i: int, j: int) -> bytes:
    a, b = sorted((i, j))
    return tagged_hash(b"quorumcrypt/auth-pair", master, a.to_bytes(2, "big"), b.to_bytes(2, "big"))


class AuthKeys:
    def __init__(self, index: int, keys: dict[int, bytes]):
        self.index = index
        self.keys = dict(keys)

    def key_for(self, peer: int) -> bytes:
        try:
            return self.keys[peer]
        except KeyError:
            raise MalformedError(f"no authentication key shared with party {peer}") from None

    def to_record(self, key_id: str = "default") -> dict:
        return {"format": FORMAT, "kind": "auth", "scheme": "AUTH", "key_id": key_id, "index": self.index,
                "keys": {str(j): b64(k) for j, k in sorted(self.keys.items())}}

    @classmethod
    def from_record(cls, record: dict) -> "AuthKeys":
        if record.get("format") != FORMAT or record.get("kind") != "auth":
            raise MalformedError("not an authentication key record")
        return cls(int(record["index"]), {int(j): unb64(k) for j, k in record["keys"].items()})

    @classmethod
    def load(cls, key_dir: str | Path, index: int, key_id: str = "default") -> "AuthKeys":
        return cls.from_record(json.loads((Path(key_dir) / auth_filename(index, key_id)).read_bytes()))


def deal_auth_keys(n: int, rng: random.Random | None = None, *, seed=None) -> list[AuthKeys]:
    rng = rng or make_rng(seed)
    master = rng.randbytes(32)
    return [AuthKeys(i, {j: pair_key(master, i, j) for j in range(1, n + 1) if j != i}) for i in range(1, n + 1)]


def write_auth_files(out_dir: str | Path, keys: list[AuthKeys], key_id: str = "default") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in keys:
        path = out / auth_filename(k.index, key_id)
        path.write_bytes(canonical_json(k.to_record(key_id)) + b"\n")
        path.chmod(0o600)
        paths.append(path)
    return paths
