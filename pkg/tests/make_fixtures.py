"""Regenerate the synthesized sample recordings under tests/fixtures.

Each file mimics a 31-node global run of one scheme.  Node latencies are
fixed per node and placed so that the per-node L95 distribution has the
target residual delay factor; above the target knee, latency grows with
the square of the rate so throughput/L95 peaks exactly at the knee.

    python tests/make_fixtures.py
"""

from __future__ import annotations

import random
from pathlib import Path

from quorumcrypt.bench import save_samples
from quorumcrypt.bench.replay import FORMAT

N, T = 31, 10
DURATION = 5.0
RATES = (1, 2, 4, 8, 16)
BASE_S = 0.2

# scheme -> (knee req/s, delta_res, eta)
TABLE = {
    "SG02": (8, 2.764, 0.266),
    "BZ03": (4, 1.074, 0.482),
    "SH00": (2, 0.986, 0.503),
    "BLS04": (4, 0.953, 0.512),
    "KG20": (4, 0.260, 0.793),
    "CKS05": (8, 3.285, 0.233),
}

OUT = Path(__file__).parent / "fixtures"


def node_latencies(delta: float, seed: str) -> dict[int, float]:
    # rank 11 of 31 is the theta percentile, rank 30 the 95th
    by_rank = []
    for r in range(1, N + 1):
        if r <= 11:
            v = BASE_S * (0.6 + 0.4 * (r - 1) / 10)
        elif r <= 30:
            v = BASE_S * (1 + delta * (r - 11) / 19)
        else:
            v = BASE_S * (1 + delta) * 1.1
        by_rank.append(v)
    nodes = list(range(1, N + 1))
    random.Random(seed).shuffle(nodes)
    return dict(zip(nodes, by_rank))


def record(scheme: str) -> dict:
    knee, delta, _ = TABLE[scheme]
    lat = node_latencies(delta, scheme)
    steps = []
    for rate in RATES:
        scale = 1.0 if rate <= knee else (rate / knee) ** 2
        samples = []
        for k in range(int(rate * DURATION)):
            sent = k / rate
            for node in range(1, N + 1):
                samples.append([f"{rate}-{k}", node, round(sent, 6), round(sent + lat[node] * scale, 6)])
        steps.append({"rate": rate, "submitted": int(rate * DURATION), "samples": samples})
    return {"format": FORMAT, "scheme": scheme, "preset": "global-31", "n": N, "t": T, "duration_s": DURATION,
            "grace": 0.1, "synthesized": True, "steps": steps}


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for scheme in TABLE:
        save_samples(record(scheme), OUT / f"do31g-{scheme}.json")


if __name__ == "__main__":
    main()
