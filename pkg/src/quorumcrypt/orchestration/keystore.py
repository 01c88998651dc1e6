"""Key manager: read-only access to a node's key shares."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from ..schemes.core import KeyShare, PublicKeyMaterial, SchemeId
from ..schemes.keyfile import load_party_shares


class UnknownKeyError(LookupError):
    pass


@dataclass(frozen=True)
class KeyEntry:
    share: KeyShare

    @property
    def public(self) -> PublicKeyMaterial:
        return self.share.public


class KeyStore:
    def __init__(self, index: int, shares: list[KeyShare] = ()):
        self.index = index
        self._keys: dict[tuple[SchemeId, str], KeyEntry] = {}
        self._lock = threading.Lock()
        for share in shares:
            self.add(share)

    @classmethod
    def from_directory(cls, key_dir: str | Path, index: int) -> "KeyStore":
        return cls(index, load_party_shares(key_dir, index))

    def add(self, share: KeyShare) -> None:
        if share.index != self.index:
            raise ValueError(f"share of party {share.index} given to party {self.index}")
        with self._lock:
            self._keys[(share.scheme, share.public.key_id)] = KeyEntry(share)

    def get(self, scheme: SchemeId | str, key_id: str = "default") -> KeyEntry:
        try:
            return self._keys[(SchemeId.parse(scheme), key_id)]
        except (KeyError, ValueError):
            raise UnknownKeyError(f"no {scheme} key named {key_id!r}") from None

    def keys(self) -> list[tuple[SchemeId, str]]:
        return sorted(self._keys, key=lambda k: (k[0].value, k[1]))

    def __contains__(self, item) -> bool:
        scheme, key_id = item
        try:
            self.get(scheme, key_id)
        except UnknownKeyError:
            return False
        return True
