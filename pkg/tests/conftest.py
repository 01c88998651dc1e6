import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quorumcrypt.schemes import ThresholdParams, deal_keys  # noqa: E402

ALL_SCHEMES = ("SG02", "BZ03", "SH00", "KG20", "BLS04", "CKS05")
TEST_RSA_BITS = 512


@functools.lru_cache(maxsize=None)
def dealt(scheme: str, n: int = 4, t: int = 1, seed: str = "tests"):
    options = {"modulus_bits": TEST_RSA_BITS} if scheme == "SH00" else {}
    return deal_keys(scheme, ThresholdParams(n, t), seed=f"{seed}/{scheme}/{n}/{t}", **options)


@pytest.fixture(params=ALL_SCHEMES)
def scheme_name(request):
    return request.param
