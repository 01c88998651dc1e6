from __future__ import annotations

from .base import Scheme
from .bls04 import Bls04
from .bz03 import Bz03
from .cks05 import Cks05
from .core import SchemeId
from .errors import UnsupportedSchemeError
from .kg20 import Kg20
from .sg02 import Sg02
from .sh00 import Sh00

_SCHEMES: dict[SchemeId, Scheme] = {s.id: s for s in (Sg02(), Bz03(), Sh00(), Kg20(), Bls04(), Cks05())}


def get(scheme: SchemeId | str) -> Scheme:
    try:
        return _SCHEMES[SchemeId.parse(scheme)]
    except KeyError:  # pragma: no cover - every SchemeId is registered
        raise UnsupportedSchemeError(f"no implementation for {scheme}") from None


def all_schemes() -> list[Scheme]:
    return list(_SCHEMES.values())
