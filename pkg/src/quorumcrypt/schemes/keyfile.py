"""Key-material files: one public record plus one private record per party.

Files are canonical JSON (sorted keys, no whitespace) with binary fields in
base64, so identical key material always produces identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import registry
from .core import KeyShare, PublicKeyMaterial, SchemeId, canonical_json
from .errors import MalformedError

FORMAT = "quorumcrypt-key/1"


def public_record(pk: PublicKeyMaterial) -> dict:
    return {"format": FORMAT, "kind": "public", **registry.get(pk.scheme).public_to_dict(pk)}


def private_record(share: KeyShare) -> dict:
    scheme = registry.get(share.scheme)
    return {
        "format": FORMAT,
        "kind": "private",
        "scheme": share.scheme.value,
        "key_id": share.public.key_id,
        "index": share.index,
        "secret": scheme.secret_to_text(share.secret),
        "public": public_record(share.public),
    }


def public_from_record(record: dict) -> PublicKeyMaterial:
    if record.get("format") != FORMAT or record.get("kind") != "public":
        raise MalformedError("not a public key record")
    return registry.get(record["scheme"]).public_from_dict(record)


def share_from_record(record: dict) -> KeyShare:
    if record.get("format") != FORMAT or record.get("kind") != "private":
        raise MalformedError("not a private key record")
    pk = public_from_record(record["public"])
    scheme = registry.get(pk.scheme)
    if SchemeId.parse(record["scheme"]) is not pk.scheme:
        raise MalformedError("scheme mismatch between share and public material")
    share = KeyShare(pk.scheme, int(record["index"]), scheme.secret_from_text(record["secret"]), pk)
    if not scheme.check_share(share):
        raise MalformedError(f"share {share.index} does not match its verification key")
    return share


def public_filename(scheme: SchemeId | str, key_id: str = "default") -> str:
    return f"{SchemeId.parse(scheme).value}-{key_id}.public.json"


def private_filename(scheme: SchemeId | str, index: int, key_id: str = "default") -> str:
    return f"{SchemeId.parse(scheme).value}-{key_id}.party-{index}.json"


def write_key_files(out_dir: str | Path, pk: PublicKeyMaterial, shares: list[KeyShare]) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    path = out / public_filename(pk.scheme, pk.key_id)
    path.write_bytes(canonical_json(public_record(pk)) + b"\n")
    written.append(path)
    for share in shares:
        path = out / private_filename(pk.scheme, share.index, pk.key_id)
        path.write_bytes(canonical_json(private_record(share)) + b"\n")
        path.chmod(0o600)
        written.append(path)
    return written


def load_record(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_bytes())
    except json.JSONDecodeError as exc:
        raise MalformedError(f"{path}: not JSON") from exc


def load_public(path: str | Path) -> PublicKeyMaterial:
    return public_from_record(load_record(path))


def load_share(path: str | Path) -> KeyShare:
    return share_from_record(load_record(path))


def load_party_shares(key_dir: str | Path, index: int) -> list[KeyShare]:
    """Every private key file in ``key_dir`` that belongs to party ``index``."""
    return [load_share(p) for p in sorted(Path(key_dir).glob(f"*.party-{index}.json"))
            if not p.name.startswith("AUTH")]
