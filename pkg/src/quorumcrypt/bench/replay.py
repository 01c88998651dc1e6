"""Recorded latency samples: dump them from a run, or replay them through the metrics."""

from __future__ import annotations

import json
from pathlib import Path

from .metrics import LatencySample, knee_capacity, summarize, usable_capacity
from .runner import BenchReport, SchemeReport

FORMAT = "quorumcrypt-samples/1"


def sample_records(report: BenchReport, n: int, t: int) -> list[dict]:
    """One record per scheme, each holding every ladder step's samples."""
    out = []
    for sr in report.schemes:
        steps = []
        for row in sr.rows:
            samples = report.samples.get((sr.scheme, row.rate), [])
            steps.append({"rate": row.rate, "submitted": row.submitted,
                          "samples": [[s.instance, s.node, s.t_received, s.t_finalized] for s in samples]})
        out.append({"format": FORMAT, "scheme": sr.scheme, "preset": report.plan.preset, "n": n, "t": t,
                    "duration_s": report.plan.duration_s, "grace": report.plan.grace, "steps": steps})
    return out


def save_samples(record: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(record, separators=(",", ":"), sort_keys=True) + "\n", encoding="utf-8")


def load_samples(path: str | Path) -> dict:
    record = json.loads(Path(path).read_text(encoding="utf-8"))
    if record.get("format") != FORMAT:
        raise ValueError(f"{path}: not a sample recording")
    return record


def replay(record: dict, usable_factor: float = 5.0) -> SchemeReport:
    sr = SchemeReport(record["scheme"])
    for step in record["steps"]:
        samples = [LatencySample(str(i), int(node), float(a), float(b)) for i, node, a, b in step["samples"]]
        sr.rows.append(summarize(record["scheme"], step["rate"], record["n"], record["t"], samples,
                                 submitted=step["submitted"], duration=record["duration_s"],
                                 grace=record.get("grace", 0.1)))
    curve = [(r.rate, r.throughput, r.network.l95) for r in sr.rows if r.completed]
    if curve:
        sr.knee = knee_capacity(curve)
        sr.usable = usable_capacity(curve, usable_factor)
    return sr
