import csv
import io
import json
import math
import sys
from pathlib import Path

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import dealt
from quorumcrypt.bench import (
    CSV_HEADER,
    CurvePoint,
    ExperimentPlan,
    LatencySample,
    MetricsError,
    PlanError,
    SimCluster,
    csv_rows,
    doubling_ladder,
    emit_report,
    knee_capacity,
    latency_fairness_index,
    load_samples,
    percentile,
    replay,
    residual_delay_factor,
    run_experiment,
    summarize,
    theta,
    throughput,
    usable_capacity,
)
from quorumcrypt.network import LatencyModel
from quorumcrypt.orchestration import ThresholdRequest

sys.path.insert(0, str(Path(__file__).parent))
from make_fixtures import TABLE  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
latencies = st.lists(st.floats(0.001, 100, allow_nan=False), min_size=1, max_size=200)


class TestPercentile:
    def test_examples(self):
        assert percentile([1, 2, 3, 4], 50) == 2
        assert percentile([4, 3, 2, 1], 100) == 4
        assert percentile([4, 3, 2, 1], 1) == 1
        assert percentile(range(1, 101), 95) == 95
        assert percentile([7, 7, 7], 33) == 7
        # 11/31 * 31 is exactly rank 11 despite float rounding
        assert percentile(range(1, 32), theta(31, 10)) == 11

    @pytest.mark.parametrize("k", [0, -1, 101])
    def test_bad_rank(self, k):
        with pytest.raises(MetricsError):
            percentile([1], k)

    def test_empty(self):
        with pytest.raises(MetricsError):
            percentile([], 50)

    @settings(max_examples=100, deadline=None)
    @given(latencies, st.floats(50, 95))
    def test_ordering(self, values, k):
        assert percentile(values, 50) <= percentile(values, k) <= percentile(values, 95)
        assert percentile(values, k) in values


class TestTheta:
    def test_values(self):
        assert theta(127, 42) == pytest.approx(33.858, abs=0.001)
        assert theta(7, 2) == pytest.approx(300 / 7)
        assert theta(4, 1) == 50.0


class TestResidual:
    def test_table_rows(self):
        for knee, delta, eta in TABLE.values():
            assert abs(1 / (1 + delta) - eta) <= 0.005

    def test_balanced(self):
        assert residual_delay_factor(2.0, 2.0) == 0.0
        assert latency_fairness_index(2.0, 2.0) == 1.0

    @pytest.mark.parametrize("l95,lth", [(1.0, 0.0), (1.0, 2.0)])
    def test_errors(self, l95, lth):
        with pytest.raises(MetricsError):
            residual_delay_factor(l95, lth)
        with pytest.raises(MetricsError):
            latency_fairness_index(lth, l95)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 1e3), st.floats(1, 1e3))
    def test_identity(self, lth, ratio):
        l95 = lth * ratio
        d, e = residual_delay_factor(l95, lth), latency_fairness_index(lth, l95)
        assert d >= 0 and 0 < e <= 1
        assert e * (1 + d) == pytest.approx(1.0, rel=1e-12)


class TestThroughput:
    def test_even_completions(self):
        times = [0.5 * (k + 1) for k in range(600)]
        assert throughput(times, 300) == pytest.approx(2.0)

    def test_grace(self):
        times = [1.0 * k for k in range(1, 60)] + [63.0]
        assert throughput(times, 60, submitted=60) == pytest.approx(60 / 63)

    def test_beyond_grace_and_backlog(self):
        times = [1.0 * k for k in range(1, 60)] + [70.0]
        assert throughput(times, 60, submitted=60) == pytest.approx(59 / 60)
        assert throughput([1.0, 2.0], 60, submitted=100) == pytest.approx(2 / 60)

    def test_zero(self):
        assert throughput([], 60) == 0.0

    def test_start_offset(self):
        assert throughput([11.0, 12.0, 14.0], 5, start=10.0) == pytest.approx(3 / 4)


def linear_flat_then_spike(knee, rates=(1, 2, 4, 8, 16, 32, 64)):
    return [CurvePoint(r, r, 0.1 if r <= knee else 1.0) for r in rates]


class TestKnee:
    def test_spike(self):
        assert knee_capacity(linear_flat_then_spike(16)) == 16

    def test_monotone_degrading(self):
        assert knee_capacity([(1, 1, 1), (2, 1, 2), (4, 1, 5)]) == 1

    def test_tie_goes_low(self):
        assert knee_capacity([(1, 1, 1), (2, 2, 2), (4, 4, 4)]) == 1

    def test_unsorted_input(self):
        assert knee_capacity([(8, 8, 1.0), (4, 4, 0.1), (2, 2, 0.1)]) == 4

    def test_empty(self):
        with pytest.raises(MetricsError):
            knee_capacity([])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 9), st.integers(1, 10))
    def test_constructed_argmax(self, k, m):
        rates = doubling_ladder(2 ** 9)
        assume(k < len(rates))
        # throughput/L95 rises to the constructed point and falls after it
        curve = [(r, r, 1.0 if i <= k else (r / rates[k]) * (1 + m)) for i, r in enumerate(rates)]
        assert knee_capacity(curve) == rates[k]

    def test_usable(self):
        curve = [(1, 1, 0.1), (2, 2, 0.1), (4, 4, 0.2), (8, 6, 0.45), (16, 7, 0.6)]
        assert knee_capacity(curve) == 2
        assert usable_capacity(curve) == 8
        assert usable_capacity(curve, factor=10) == 16
        assert usable_capacity(curve, factor=1) == 2


def samples_for(latency_by_node, requests=10, spacing=1.0):
    return [LatencySample(f"r{k}", node, k * spacing, k * spacing + lat)
            for k in range(requests) for node, lat in latency_by_node.items()]


class TestSummarize:
    def test_scopes(self):
        lat = {1: 0.1, 2: 0.1, 3: 0.2, 4: 0.5}
        m = summarize("SG02", 1, 4, 1, samples_for(lat), submitted=10, duration=10)
        assert m.completed == 10
        assert m.network.ltheta == pytest.approx(0.1) and m.network.l95 == pytest.approx(0.5)
        assert m.node_l95 == pytest.approx(lat)
        assert m.node.delta_res == pytest.approx(4.0)
        assert m.node.eta * (1 + m.node.delta_res) == pytest.approx(1.0)
        assert m.throughput == pytest.approx(10 / 9.1)

    def test_quorum_completion(self):
        # only t nodes ever finish: nothing counts as processed
        samples = samples_for({1: 0.1})
        assert summarize("SG02", 1, 4, 1, samples, submitted=10, duration=10).completed == 0

    def test_empty(self):
        m = summarize("SG02", 1, 4, 1, [], submitted=5, duration=10)
        assert m.completed == 0 and math.isnan(m.network.l95)

    def test_negative_latency(self):
        with pytest.raises(MetricsError):
            LatencySample("x", 1, 2.0, 1.0)


class TestPlan:
    def test_defaults(self):
        plan = ExperimentPlan("local-7", ["sg02"])
        assert plan.rates[0] == 1 and plan.rates[-1] == 1024 and plan.schemes == ("SG02",)
        assert ExperimentPlan("global-127", ["SG02"]).rates[-1] == 64

    def test_roundtrip(self, tmp_path):
        plan = ExperimentPlan("local-7", ["SG02", "KG20"], rates=(2, 4), duration_s=3, compute={"share": 0.001})
        plan.save(tmp_path / "p.json")
        assert ExperimentPlan.load(tmp_path / "p.json") == plan

    @pytest.mark.parametrize("kw", [
        {"rates": (1, 3)}, {"rates": (0, 0)}, {"duration_s": 0}, {"payload_size": 100}, {"schemes": ()},
        {"preset": "nowhere"},
    ])
    def test_invalid(self, kw):
        args = {"preset": "local-7", "schemes": ("SG02",), **kw}
        with pytest.raises((PlanError, ValueError)):
            ExperimentPlan(**args)

    def test_unknown_field(self):
        with pytest.raises(PlanError):
            ExperimentPlan.from_dict({"preset": "local-7", "schemes": ["SG02"], "colour": "red"})


class TestCluster:
    def test_requests_per_rate(self):
        plan = ExperimentPlan("local-7", ["BLS04"], rates=(1, 2), duration_s=3)
        report = run_experiment(plan)
        assert [r.submitted for r in report.schemes[0].rows] == [3, 6]
        assert all(r.completed == r.submitted for r in report.schemes[0].rows)

    def test_crashed_nodes_do_not_finalize(self):
        pk, shares = dealt("CKS05", 7, 2)
        cluster = SimCluster(7, shares, latency=LatencyModel.constant(10))
        cluster.crash(6, 7)
        iid = cluster.submit(ThresholdRequest.coin("CKS05", b"c"))
        cluster.run()
        results = cluster.results(iid)
        assert all(results[i].status == "finished" for i in range(1, 6))
        assert results[6].status == "unknown"


@pytest.fixture(scope="module")
def report():
    plan = ExperimentPlan("local-7", ["SG02", "KG20"], rates=(1, 2), duration_s=2, seed="ab")
    return run_experiment(plan)


class TestReport:
    def test_csv_header_and_rows(self, report):
        rows = list(csv.reader(io.StringIO(csv_rows([r for s in report.schemes for r in s.rows]))))
        assert tuple(rows[0]) == CSV_HEADER
        assert [r[:2] for r in rows[1:]] == [["SG02", "1"], ["SG02", "2"], ["KG20", "1"], ["KG20", "2"]]
        for r in rows[1:]:
            l50, lth, l95, d, e = map(float, r[3:])
            assert lth <= l95 and l50 <= l95
            assert e * (1 + d) == pytest.approx(1.0, abs=1e-5)

    def test_emit_is_deterministic(self, report, tmp_path):
        a = emit_report(report, tmp_path / "a", plots=False)
        b = emit_report(report, tmp_path / "b", plots=False)
        assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]
        summary = json.loads((tmp_path / "a" / "summary.json").read_text())
        assert set(summary["schemes"]) == {"SG02", "KG20"}

    def test_plots(self, report, tmp_path):
        from PIL import Image

        paths = [p for p in emit_report(report, tmp_path) if p.suffix == ".png"]
        assert len(paths) == 2
        for p in paths:
            assert p.stat().st_size > 0
            with Image.open(p) as img:
                assert img.size[0] > 100

    def test_unwritable(self, report, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OSError):
            emit_report(report, blocker / "sub", plots=False)


class TestFixtureReplay:
    @pytest.mark.parametrize("scheme", sorted(TABLE))
    def test_table_rows(self, scheme):
        knee, delta, eta = TABLE[scheme]
        record = load_samples(FIXTURES / f"do31g-{scheme}.json")
        assert record["synthesized"] is True and (record["n"], record["t"]) == (31, 10)
        sr = replay(record)
        assert sr.knee == knee
        row = next(r for r in sr.rows if r.rate == knee)
        assert row.node.delta_res == pytest.approx(delta, abs=1e-3)
        assert abs(row.node.eta - eta) <= 0.005
        assert sr.usable >= sr.knee

    def test_cli_replay(self, tmp_path):
        from click.testing import CliRunner

        from quorumcrypt.cli import main

        result = CliRunner().invoke(main, ["bench", "replay", "--samples", str(FIXTURES / "do31g-SG02.json"),
                                           "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["schemes"]["SG02"]["knee_capacity"] == 8
