"""Runs an experiment plan on an in-process simulated cluster.

Requests are injected open-loop at fixed intervals and delivered to every
node at the same virtual instant.  Each ladder step starts from a fresh
cluster.  Latencies are server-side: from a node receiving the request to
that node finalizing it.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from ..network.config import LatencyModel, load_preset
from ..network.simulated import ComputeModel
from ..orchestration import ThresholdRequest
from ..rng import SeededRng, make_rng
from ..schemes import deal_keys, encrypt, registry
from ..schemes.core import SchemeId, SchemeKind, ThresholdParams
from .cluster import SimCluster
from .metrics import LatencySample, RateMetrics, knee_capacity, summarize, usable_capacity
from .plan import ExperimentPlan

log = logging.getLogger("quorumcrypt.bench")

OPS = ("verify_request", "share", "verify_share", "combine", "frost_round1", "frost_round2")


@dataclass
class SchemeReport:
    scheme: str
    rows: list[RateMetrics] = field(default_factory=list)
    knee: float | None = None
    usable: float | None = None


@dataclass
class BenchReport:
    plan: ExperimentPlan
    schemes: list[SchemeReport] = field(default_factory=list)
    samples: dict[tuple[str, int], list[LatencySample]] = field(default_factory=dict)


def deal_for(plan: ExperimentPlan, scheme: str, n: int, t: int):
    options = {"modulus_bits": plan.rsa_bits} if scheme == SchemeId.SH00.value else {}
    return deal_keys(scheme, ThresholdParams(n, t), seed=f"{plan.seed}/keys/{scheme}", **options)


def make_requests(plan: ExperimentPlan, pk, count: int) -> list[ThresholdRequest]:
    rng = SeededRng(f"{plan.seed}/requests/{pk.scheme.value}")
    impl = registry.get(pk.scheme)
    out = []
    for k in range(count):
        data = rng.randbytes(plan.payload_size)
        if pk.scheme.kind is SchemeKind.CIPHER:
            c = encrypt(pk, f"req-{k}".encode(), data, rng)
            out.append(ThresholdRequest.decrypt(pk.scheme, impl.ciphertext_to_bytes(c), pk.key_id))
        elif pk.scheme.kind is SchemeKind.SIGNATURE:
            out.append(ThresholdRequest.sign(pk.scheme, k.to_bytes(8, "big") + data, pk.key_id))
        else:
            out.append(ThresholdRequest.coin(pk.scheme, k.to_bytes(8, "big") + data, pk.key_id))
    return out


def measure_compute(pk, shares, repeat: int = 3) -> ComputeModel:
    """Time each operation on this machine (non-deterministic by nature)."""
    impl = registry.get(pk.scheme)
    req = make_requests(ExperimentPlan("local-7", (pk.scheme.value,), rates=(1,)), pk, 1)[0].decoded()
    signers = shares[: pk.params.quorum]
    costs: dict = {}

    def timed(op, fn, times=repeat):
        best, out = None, None
        for _ in range(times):
            t0 = time.perf_counter()
            out = fn()
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        key = (pk.scheme.value, op)
        costs[key] = min(costs.get(key, best), best)
        return out

    rng = make_rng(1)
    if pk.scheme is SchemeId.KG20:
        rounds = {s.index: timed("frost_round1", lambda s=s: impl.round1(s, rng)) for s in signers}
        request = impl.signing_request(pk, req, {i: c for i, (_, c) in rounds.items()})
        # nonces are single-use, so each response is timed once
        parts = [timed("frost_round2", lambda s=s: impl.round2(s, request, rounds[s.index][0]), 1) for s in signers]
    else:
        request = req
        if pk.scheme.kind is SchemeKind.CIPHER:
            timed("verify_request", lambda: impl.verify_ciphertext(pk, req))
        parts = [timed("share", lambda s=s: impl.create_share(s, req, rng)) for s in signers]
    timed("verify_share", lambda: impl.verify_share(pk, request, parts[-1]))
    timed("combine", lambda: impl.verify_result(pk, request, impl.combine(pk, request, parts)))
    return ComputeModel(costs)


def compute_model(plan: ExperimentPlan, pk, shares) -> ComputeModel:
    if plan.compute == "zero":
        return ComputeModel()
    if plan.compute == "measured":
        return measure_compute(pk, shares)
    if isinstance(plan.compute, dict):
        costs = {}
        for key, value in plan.compute.items():
            scheme, _, op = key.rpartition("/")
            costs[(scheme, op) if scheme else op] = float(value)
        return ComputeModel(costs)
    raise ValueError(f"unknown compute model {plan.compute!r}")


def run_rate(plan: ExperimentPlan, scheme: str, rate: int, pk, shares, requests, compute: ComputeModel):
    preset = load_preset(plan.preset)
    latency = (LatencyModel.constant(plan.constant_delay_ms) if plan.constant_delay_ms is not None
               else preset.latency_model)
    tob = preset.tob_enabled if plan.tob_enabled is None else plan.tob_enabled
    cluster = SimCluster(preset.n, shares, latency=latency, seed=f"{plan.seed}/{scheme}/{rate}", compute=compute,
                         tob_enabled=tob, tob_latency_ms=preset.tob_latency_ms,
                         orchestration={"frost_precompute": plan.precompute and scheme == "KG20"})
    cluster.crash(*plan.crashed)
    count = len(requests)
    if plan.precompute and scheme == "KG20":
        cluster.precompute(count)
    t0 = cluster.net.now
    for k, request in enumerate(requests):
        cluster.submit(request, at=t0 + k / rate)
    cluster.run(until=t0 + plan.duration_s * (1 + plan.grace))
    samples = [LatencySample(s.instance, s.node, s.t_received - t0, s.t_finalized - t0) for s in cluster.samples()]
    metrics = summarize(scheme, rate, preset.n, pk.params.t, samples, submitted=count, duration=plan.duration_s,
                        grace=plan.grace)
    return metrics, samples


def run_experiment(plan: ExperimentPlan, progress=None) -> BenchReport:
    preset = load_preset(plan.preset)
    n, t = preset.n, preset.t if preset.t is not None else (preset.n - 1) // 3
    report = BenchReport(plan)
    for scheme in plan.schemes:
        pk, shares = deal_for(plan, scheme, n, t)
        compute = compute_model(plan, pk, shares)
        sr = SchemeReport(scheme)
        for rate in plan.rates:
            count = max(1, round(rate * plan.duration_s))
            requests = make_requests(plan, pk, count)
            metrics, samples = run_rate(plan, scheme, rate, pk, shares, requests, compute)
            sr.rows.append(metrics)
            report.samples[(scheme, rate)] = samples
            if progress:
                progress(metrics)
        curve = [(r.rate, r.throughput, r.network.l95) for r in sr.rows if r.completed]
        if curve:
            sr.knee = knee_capacity(curve)
            sr.usable = usable_capacity(curve, plan.usable_factor)
        report.schemes.append(sr)
    return report
