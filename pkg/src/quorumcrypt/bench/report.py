"""CSV and plot output for bench reports."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .metrics import RateMetrics
from .runner import BenchReport

CSV_HEADER = ("scheme", "rate", "throughput", "L50", "Lθ", "L95", "δ_res", "η_θ")
DETAIL_HEADER = ("scheme", "rate", "n", "t", "theta", "submitted", "completed", "throughput",
                 "net_L50_ms", "net_Ltheta_ms", "net_L95_ms", "net_delta_res", "net_eta",
                 "node_L50_ms", "node_Ltheta_ms", "node_L95_ms", "node_delta_res", "node_eta")


def _f(x: float) -> str:
    return "nan" if x != x else f"{x:.6f}"


def _ms(x: float) -> str:
    return _f(x * 1000.0)


def csv_rows(rows: list[RateMetrics]) -> str:
    """Latencies in milliseconds, network scope; δ_res and η_θ from per-node L95 values."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow((r.scheme, r.rate, _f(r.throughput), _ms(r.network.l50), _ms(r.network.ltheta),
                    _ms(r.network.l95), _f(r.node.delta_res), _f(r.node.eta)))
    return buf.getvalue()


def detail_rows(rows: list[RateMetrics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DETAIL_HEADER)
    for r in rows:
        w.writerow((r.scheme, r.rate, r.n, r.t, _f(r.theta), r.submitted, r.completed, _f(r.throughput),
                    _ms(r.network.l50), _ms(r.network.ltheta), _ms(r.network.l95), _f(r.network.delta_res),
                    _f(r.network.eta), _ms(r.node.l50), _ms(r.node.ltheta), _ms(r.node.l95),
                    _f(r.node.delta_res), _f(r.node.eta)))
    return buf.getvalue()


def summary(report: BenchReport) -> dict:
    return {
        "plan": report.plan.to_dict(),
        "schemes": {s.scheme: {"knee_capacity": s.knee, "usable_capacity": s.usable} for s in report.schemes},
    }


def emit_report(report: BenchReport, out_dir: str | Path, plots: bool = True) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [r for s in report.schemes for r in s.rows]
    written = []
    for name, text in (("report.csv", csv_rows(rows)), ("report_detail.csv", detail_rows(rows)),
                       ("summary.json", json.dumps(summary(report), indent=2, sort_keys=True) + "\n")):
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    if plots and rows:
        written += plot_report(report, out)
    return written


def plot_report(report: BenchReport, out: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    fig, ax = plt.subplots(figsize=(6, 4))
    for s in report.schemes:
        pts = [(r.throughput, r.network.l95 * 1000) for r in s.rows if r.completed]
        if pts:
            ax.plot(*zip(*pts), marker="o", label=s.scheme)
    ax.set_xlabel("throughput (req/s)")
    ax.set_ylabel("L95 latency (ms)")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_title(f"throughput vs latency, {report.plan.preset}")
    ax.legend()
    fig.tight_layout()
    path = out / "throughput_latency.png"
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    names, width = [s.scheme for s in report.schemes], 0.25
    picks = []
    for s in report.schemes:
        row = next((r for r in s.rows if r.rate == s.knee), None) or (s.rows[0] if s.rows else None)
        picks.append(row)
    for k, (label, attr) in enumerate((("Lθ", "ltheta"), ("L50", "l50"), ("L95", "l95"))):
        xs = [i + (k - 1) * width for i in range(len(names))]
        ax.bar(xs, [getattr(r.network, attr) * 1000 if r else 0 for r in picks], width, label=label)
    ax.set_xticks(range(len(names)), names)
    ax.set_ylabel("latency (ms)")
    ax.set_title("percentile comparison at knee capacity")
    ax.legend()
    fig.tight_layout()
    path = out / "percentiles.png"
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    paths.append(path)
    return paths
