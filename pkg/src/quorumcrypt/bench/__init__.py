"""Benchmark orchestration and latency metrics."""

from .cluster import SimCluster
from .metrics import (
    CurvePoint,
    LatencySample,
    MetricsError,
    RateMetrics,
    ScopeMetrics,
    knee_capacity,
    latency_fairness_index,
    percentile,
    residual_delay_factor,
    summarize,
    theta,
    throughput,
    usable_capacity,
)
from .plan import ExperimentPlan, PlanError, doubling_ladder
from .replay import load_samples, replay, sample_records, save_samples
from .report import CSV_HEADER, csv_rows, emit_report
from .runner import BenchReport, run_experiment

__all__ = [
    "CSV_HEADER", "BenchReport", "CurvePoint", "ExperimentPlan", "LatencySample", "MetricsError", "PlanError",
    "RateMetrics", "ScopeMetrics", "SimCluster", "csv_rows", "doubling_ladder", "emit_report", "knee_capacity",
    "latency_fairness_index", "load_samples", "percentile", "replay", "residual_delay_factor", "run_experiment",
    "sample_records", "save_samples", "summarize", "theta", "throughput", "usable_capacity",
]
