"""Latency and capacity metrics.

Percentiles use the nearest-rank rule.  With ``theta = (t+1)/n * 100`` the
threshold latency ``L_theta`` is the time by which a finalizing quorum is
done; the residual delay factor ``delta = (L95 - L_theta) / L_theta`` and the
fairness index ``eta = L_theta / L95`` describe how far slow nodes trail it.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field


class MetricsError(ValueError):
    pass


def theta(n: int, t: int) -> float:
    return (t + 1) / n * 100.0


def percentile(samples: Iterable[float], k: float) -> float:
    values = sorted(samples)
    if not values:
        raise MetricsError("percentile of an empty sample")
    if not 0 < k <= 100:
        raise MetricsError("percentile rank must lie in (0, 100]")
    rank = math.ceil(k / 100.0 * len(values) - 1e-9)
    return values[max(rank, 1) - 1]


def residual_delay_factor(l95: float, ltheta: float) -> float:
    if ltheta <= 0:
        raise MetricsError("L_theta must be positive")
    if l95 < ltheta:
        raise MetricsError("L95 below L_theta violates percentile ordering")
    return (l95 - ltheta) / ltheta


def latency_fairness_index(ltheta: float, l95: float) -> float:
    if ltheta <= 0:
        raise MetricsError("L_theta must be positive")
    if l95 < ltheta:
        raise MetricsError("L95 below L_theta violates percentile ordering")
    return ltheta / l95


def throughput(completion_times: Sequence[float], duration: float, *, start: float = 0.0,
               submitted: int | None = None, grace: float = 0.1) -> float:
    """Completed requests per second.

    The elapsed time runs from ``start`` (first request received) to the last
    completion, which may overrun ``duration`` by at most ``grace``.  If some
    of the ``submitted`` requests never complete, the full duration is the
    denominator.
    """
    horizon = start + duration * (1 + grace)
    done = [t for t in completion_times if t <= horizon]
    if not done:
        return 0.0
    if submitted is not None and len(done) < submitted:
        return len(done) / duration
    elapsed = max(done) - start
    if elapsed <= 0:
        elapsed = duration
    return len(done) / elapsed


@dataclass(frozen=True)
class CurvePoint:
    rate: float
    throughput: float
    l95: float


def knee_capacity(curve: Iterable) -> float:
    """Rate maximizing throughput / L95; ties go to the lower rate."""
    points = sorted((p if isinstance(p, CurvePoint) else CurvePoint(*p) for p in curve), key=lambda p: p.rate)
    if not points:
        raise MetricsError("knee of an empty curve")
    best, best_ratio = None, -math.inf
    for p in points:
        ratio = p.throughput / p.l95 if p.l95 > 0 else math.inf
        if ratio > best_ratio:
            best, best_ratio = p, ratio
    return best.rate


def usable_capacity(curve: Iterable, factor: float = 5.0) -> float:
    """Highest rate whose L95 stays within ``factor`` times the L95 at the knee."""
    points = sorted((p if isinstance(p, CurvePoint) else CurvePoint(*p) for p in curve), key=lambda p: p.rate)
    knee = knee_capacity(points)
    limit = next(p.l95 for p in points if p.rate == knee) * factor
    return max(p.rate for p in points if p.l95 <= limit)


@dataclass(frozen=True)
class LatencySample:
    instance: str
    node: int
    t_received: float
    t_finalized: float

    def __post_init__(self):
        if self.t_finalized < self.t_received:
            raise MetricsError("latency must be non-negative")

    @property
    def latency(self) -> float:
        return self.t_finalized - self.t_received


@dataclass(frozen=True)
class ScopeMetrics:
    l50: float
    ltheta: float
    l95: float
    delta_res: float
    eta: float


@dataclass(frozen=True)
class RateMetrics:
    scheme: str
    rate: float
    n: int
    t: int
    submitted: int
    completed: int
    throughput: float
    network: ScopeMetrics
    node: ScopeMetrics
    node_l95: dict[int, float] = field(default_factory=dict)

    @property
    def theta(self) -> float:
        return theta(self.n, self.t)


def _scope(values: list[float], th: float) -> ScopeMetrics:
    l50, lth, l95 = percentile(values, 50), percentile(values, th), percentile(values, 95)
    if lth <= 0:
        return ScopeMetrics(l50, lth, l95, 0.0, 1.0)
    return ScopeMetrics(l50, lth, l95, residual_delay_factor(l95, lth), latency_fairness_index(lth, l95))


def summarize(scheme: str, rate: float, n: int, t: int, samples: Sequence[LatencySample], *, submitted: int,
              duration: float, grace: float = 0.1) -> RateMetrics:
    """Metrics for one ladder step.

    Network scope pools every (request, node) latency.  Node scope takes each
    node's own L95 and computes the percentiles over those per-node values.
    A request counts as processed once t+1 nodes have finalized it.
    """
    th = theta(n, t)
    if not samples:
        empty = ScopeMetrics(math.nan, math.nan, math.nan, math.nan, math.nan)
        return RateMetrics(scheme, rate, n, t, submitted, 0, 0.0, empty, empty, {})
    per_request: dict[str, list[LatencySample]] = defaultdict(list)
    per_node: dict[int, list[float]] = defaultdict(list)
    for s in samples:
        per_request[s.instance].append(s)
        per_node[s.node].append(s.latency)
    start = min(s.t_received for s in samples)
    completions = []
    for group in per_request.values():
        if len(group) >= t + 1:
            completions.append(sorted(x.t_finalized for x in group)[t])
    tp = throughput(completions, duration, start=start, submitted=submitted, grace=grace)
    node_l95 = {i: percentile(v, 95) for i, v in sorted(per_node.items())}
    network = _scope([s.latency for s in samples], th)
    node = _scope(list(node_l95.values()), th)
    return RateMetrics(scheme, rate, n, t, submitted, len(completions), tp, network, node, node_l95)
