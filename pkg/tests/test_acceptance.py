"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import dataclasses
import itertools
import json
import os
import socket
import subprocess
import sys
import time
from pathlib import Path

import pytest

import oracles
from conftest import ALL_SCHEMES, dealt
from test_protocols import IID, frost_parties, single
from test_schemes import frost_sign, run_scheme
from quorumcrypt import schemes as S
from quorumcrypt.bench import ExperimentPlan, SimCluster, emit_report, knee_capacity, run_experiment, theta
from quorumcrypt.groups import BN254_G1, BN254_G2, pairing
from quorumcrypt.network import load_preset
from quorumcrypt.orchestration import ThresholdRequest
from quorumcrypt.protocols import Progress
from quorumcrypt.rng import SeededRng
from quorumcrypt.schemes import registry
from quorumcrypt.schemes.core import b64, unb64
from quorumcrypt.service.client import Client, result_bytes

DETERMINISTIC = ("SH00", "BLS04", "CKS05")


@pytest.fixture
def verdict(capsys):
    def say(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {number:2}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else ""))
        assert ok, detail

    return say


def _ms(seconds):
    # virtual timestamps are sums of floats; compare at nanosecond resolution
    return round(seconds * 1000.0, 6)


# -- 1 --------------------------------------------------------------------------------


def _subset_outcomes(scheme, n, t):
    pk, shares = dealt(scheme, n, t)
    impl = registry.get(scheme)
    outputs, failures = set(), []
    if scheme == "KG20":
        for signers in itertools.combinations(range(1, n + 1), t + 1):
            request, partials = frost_sign(shares, signers, b"matrix")
            ok = all(S.verify_share(pk, request, p) for p in partials)
            sig = S.combine(pk, request, partials)
            if not (ok and S.verify_result(pk, b"matrix", sig)):
                failures.append(signers)
        request, partials = frost_sign(shares, tuple(range(1, t + 2)), b"matrix")
        short = partials[:t]
    else:
        request, partials = run_scheme(scheme, shares, b"matrix")
        for subset in itertools.combinations(partials, t + 1):
            ok = all(S.verify_share(pk, request, p) for p in subset)
            result = S.combine(pk, request, subset)
            if not (ok and S.verify_result(pk, request, result)):
                failures.append(tuple(p.index for p in subset))
            outputs.add(impl.result_to_bytes(result, pk))
        short = partials[:t]
    try:
        S.combine(pk, request, short)
        short_fails = False
    except S.ThresholdError:
        short_fails = True
    return outputs, failures, short_fails


def test_criterion_1_scheme_correctness_matrix(verdict):
    t0 = time.monotonic()
    problems = []
    for scheme in ALL_SCHEMES:
        for n, t in ((4, 1), (7, 2)):
            outputs, failures, short_fails = _subset_outcomes(scheme, n, t)
            if failures:
                problems.append(f"{scheme}({n},{t}) failed subsets {failures[:3]}")
            if scheme in DETERMINISTIC and len(outputs) != 1:
                problems.append(f"{scheme}({n},{t}) gave {len(outputs)} distinct outputs")
            if scheme in ("SG02", "BZ03") and outputs != {b"matrix"}:
                problems.append(f"{scheme}({n},{t}) wrong plaintext")
            if not short_fails:
                problems.append(f"{scheme}({n},{t}) combined t shares")
    elapsed = time.monotonic() - t0
    verdict(1, "scheme correctness matrix", not problems and elapsed < 120,
            "; ".join(problems) or f"6 schemes x 2 settings, every quorum, {elapsed:.1f}s")


# -- 2 --------------------------------------------------------------------------------


def test_criterion_2_single_verifier_compatibility(verdict):
    rng = SeededRng("criterion-2")
    messages = [rng.randbytes(1 + rng.randrange(200)) for _ in range(100)]
    bad = {"BLS04": 0, "KG20": 0, "SH00": 0}

    pk, shares = dealt("BLS04")
    g2 = BN254_G2.generator()
    for m in messages:
        sig = S.combine(pk, m, [S.sign_share(s, m) for s in shares[1:3]])
        h = BN254_G1.hash_to_group(b"quorumcrypt/BLS04/message", m)
        bad["BLS04"] += pairing(sig.point, g2) != pairing(h, pk.group_public_key)

    pk, shares = dealt("KG20")
    y = oracles.ed_decode(pk.group_public_key.encode())
    for k, m in enumerate(messages):
        signers = ((1, 2), (2, 4), (3, 4), (1, 3))[k % 4]
        request, partials = frost_sign(shares, signers, m, SeededRng(f"c2/{k}"))
        sig = S.combine(pk, request, partials)
        c = oracles.sha512_scalar(oracles.L, b"quorumcrypt/KG20/challenge", sig.commitment.encode(),
                                  pk.group_public_key.encode(), m)
        r = oracles.ed_decode(sig.commitment.encode())
        bad["KG20"] += oracles.ed_mul(sig.response, oracles.BASE) != oracles.ed_add(r, oracles.ed_mul(c, y))

    pk, shares = dealt("SH00")
    mod = pk.group_public_key
    for m in messages:
        sig = S.combine(pk, m, [S.sign_share(s, m) for s in shares[2:4]])
        padded = oracles.fdh(b"quorumcrypt/SH00/fdh", m, mod.byte_length + 16, mod.n_modulus)
        bad["SH00"] += pow(sig.value, mod.public_exponent, mod.n_modulus) != padded

    verdict(2, "single-verifier compatibility", not any(bad.values()),
            ", ".join(f"{k}: {100 - v}/100" for k, v in bad.items()))


# -- 3 --------------------------------------------------------------------------------


def _robust_run(scheme):
    """Party 2 sends a share for another request; honest parties see it first."""
    _, protocols, request = single(scheme, request=b"robust")
    _, liars, _ = single(scheme, request=b"something else")
    honest = {p.index: p.do_round() for p in protocols}
    forged = liars[1].do_round()
    assert forged.sender == 2 and forged.instance_id == IID
    out = {}
    for p in protocols:
        if p.index == 2:
            continue
        for m in [forged] + [honest[i] for i in (1, 3, 4)]:
            if p.update(m) is Progress.READY_TO_FINALIZE:
                break
        r = p.finalize()
        out[p.index] = r.encoded if r.ok else None
    return out


def _frost_corrupt_run():
    _, parties = frost_parties(4, 1, (1, 2), message=b"robust")
    m1, m2 = parties[0].do_round(), parties[1].do_round()
    for p in parties:
        p.update(m1)
        p.update(m2)
    r1, r2 = parties[0].do_round(), parties[1].do_round()
    record = json.loads(r2.payload)
    record["z"] = record["z"][:-8] + "AAAAAAA="
    bad = dataclasses.replace(r2, payload=json.dumps(record).encode())
    out = {}
    for p in parties:
        if p.index == 2:
            continue
        p.update(r1)
        p.update(bad)
        r = p.finalize()
        out[p.index] = (r.ok, r.error)
    return out


def test_criterion_3_robustness_and_abort(verdict):
    problems = []
    for scheme in (s for s in ALL_SCHEMES if s != "KG20"):
        first, second = _robust_run(scheme), _robust_run(scheme)
        if None in first.values() or len(set(first.values())) != 1:
            problems.append(f"{scheme} did not finalize consistently")
        if scheme in ("SG02", "BZ03") and set(first.values()) != {b"robust"}:
            problems.append(f"{scheme} wrong plaintext")
        if first != second:
            problems.append(f"{scheme} not deterministic")
    frost, again = _frost_corrupt_run(), _frost_corrupt_run()
    if any(ok for ok, _ in frost.values()):
        problems.append("KG20 finalized despite a bad response")
    if frost != again:
        problems.append("KG20 abort not deterministic")
    verdict(3, "robustness and abort behaviour", not problems,
            "; ".join(problems) or "5 robust schemes finalize, KG20 aborts at all honest parties")


# -- 4 and 5 --------------------------------------------------------------------------

TABLE = {  # scheme: (knee capacity, δ_res, η_θ)
    "SG02": (8, 2.764, 0.266),
    "BZ03": (4, 1.074, 0.482),
    "SH00": (2, 0.986, 0.503),
    "BLS04": (4, 0.953, 0.512),
    "KG20": (4, 0.260, 0.793),
    "CKS05": (8, 3.285, 0.233),
}


def test_criterion_4_metric_formula_fidelity(verdict):
    from quorumcrypt.bench import latency_fairness_index, residual_delay_factor

    errors = {}
    for scheme, (_, delta, eta) in TABLE.items():
        # δ from an L95/Lθ pair, then η from the same pair
        l95, ltheta = 1.0 + delta, 1.0
        assert abs(residual_delay_factor(l95, ltheta) - delta) < 1e-12
        errors[scheme] = abs(latency_fairness_index(ltheta, l95) - eta)
    worst = max(errors, key=errors.get)
    verdict(4, "η = 1/(1+δ) on all six rows", all(e <= 0.005 for e in errors.values()),
            f"largest deviation {errors[worst]:.4f} ({worst})")


def test_criterion_5_theta_definition(verdict):
    value = theta(127, 42)
    verdict(5, "θ(127, 42)", abs(value - 33.86) <= 0.01, f"{value:.4f}")


# -- 6 --------------------------------------------------------------------------------


def _ltheta_ms(scheme, precompute=False):
    plan = ExperimentPlan("local-7", (scheme,), rates=(20,), duration_s=10, constant_delay_ms=100,
                          compute="zero", precompute=precompute, seed="criterion-6")
    row = run_experiment(plan).schemes[0].rows[0]
    return row, _ms(row.network.ltheta)


def test_criterion_6_round_structure_latency(verdict):
    sg, sg_l = _ltheta_ms("SG02")
    kg, kg_l = _ltheta_ms("KG20")
    pre, pre_l = _ltheta_ms("KG20", precompute=True)
    enough = min(sg.completed, kg.completed, pre.completed) >= 200
    ok = enough and 100 <= sg_l < 200 and 200 <= kg_l < 400 and 100 <= pre_l < 200
    verdict(6, "round-structure latency at 100 ms one-way", ok,
            f"SG02 {sg_l:g} ms, KG20 {kg_l:g} ms, KG20+precompute {pre_l:g} ms, "
            f"{min(sg.completed, kg.completed, pre.completed)} requests each")


# -- 7 --------------------------------------------------------------------------------


def _liveness(crashed, count=100, timeout_s=30.0):
    preset = load_preset("local-7")
    pk, shares = dealt("SG02", 7, 2)
    cluster = SimCluster.from_config(preset, shares, seed="criterion-7")
    cluster.crash(*crashed)
    rng = SeededRng("criterion-7/requests")
    impl = registry.get("SG02")
    iids = []
    for k in range(count):
        c = S.encrypt(pk, b"", rng.randbytes(64), rng)
        iids.append(cluster.submit(ThresholdRequest.decrypt("SG02", impl.ciphertext_to_bytes(c)), at=k * 0.01))
    cluster.run(until=count * 0.01 + timeout_s)
    live = [i for i in range(1, 8) if i not in crashed]
    done = sum(all(cluster.results(iid)[i].status == "finished" for i in live) for iid in iids)
    return done


def test_criterion_7_fault_tolerant_liveness(verdict):
    # With t+1 = 3 of 7 crashed, four live nodes still hold a quorum of three, so a
    # correct cluster finalizes; only n-t = 5 crashes leave too few shares.
    with_t = _liveness((6, 7))
    with_t1 = _liveness((5, 6, 7))
    below_quorum = _liveness((3, 4, 5, 6, 7))
    verdict(7, "liveness with t and t+1 crashes (n=7, t=2)", with_t == 100 and with_t1 == 0,
            f"t crashed: {with_t}/100 finalized, t+1 crashed: {with_t1}/100, "
            f"n-t crashed: {below_quorum}/100")


# -- 8 --------------------------------------------------------------------------------


def test_criterion_8_determinism(verdict, tmp_path):
    plan = ExperimentPlan("local-7", ("SG02", "KG20", "CKS05"), rates=(4, 8), duration_s=3,
                          compute={"share": 0.002, "verify_share": 0.001, "combine": 0.003}, seed="criterion-8")
    a = emit_report(run_experiment(plan), tmp_path / "a", plots=False)[0].read_bytes()
    b = emit_report(run_experiment(plan), tmp_path / "b", plots=False)[0].read_bytes()
    verdict(8, "byte-identical CSV across runs", a == b and a.count(b"\n") == 7, f"{len(a)} bytes")


# -- 9 --------------------------------------------------------------------------------


def _free_block(count):
    """A base port with ``base+1 .. base+count`` all bindable."""
    for _ in range(50):
        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        base = probe.getsockname()[1] - 1
        probe.close()
        if base + count >= 65535:
            continue
        socks = []
        try:
            for p in range(base + 1, base + count + 1):
                s = socket.socket()
                socks.append(s)
                s.bind(("127.0.0.1", p))
            return base
        except OSError:
            continue
        finally:
            for s in socks:
                s.close()
    raise RuntimeError("no free port block")


def _cli(*args, **kw):
    return subprocess.run([sys.executable, "-m", "quorumcrypt.cli", *args], check=True, capture_output=True,
                          text=True, **kw)


@pytest.fixture
def socket_nodes(tmp_path):
    keys, cfg = tmp_path / "keys", tmp_path / "cfg"
    _cli("deal", "--scheme", "SG02", "--n", "4", "--t", "1", "--out", str(keys), "--seed", "5eed")
    _cli("deal", "--scheme", "AUTH", "--n", "4", "--t", "1", "--out", str(keys), "--seed", "0a17")
    base, rpc_base = _free_block(4), None
    while rpc_base is None or abs(rpc_base - base) < 8:
        rpc_base = _free_block(4)
    _cli("config", "loopback", "--n", "4", "--out", str(cfg), "--base-port", str(base), "--rpc-base-port",
         str(rpc_base), "--auth")
    env = dict(os.environ, PYTHONUNBUFFERED="1")
    procs = [subprocess.Popen([sys.executable, "-m", "quorumcrypt.cli", "node", "--config",
                               str(cfg / f"node-{i}.json"), "--keys", str(keys)],
                              stdout=subprocess.DEVNULL, stderr=open(tmp_path / f"node-{i}.log", "w"), env=env)
             for i in range(1, 5)]
    clients = [Client(f"127.0.0.1:{rpc_base + i}", timeout=5) for i in range(1, 5)]
    try:
        deadline = time.monotonic() + 30
        for c in clients:
            while True:
                try:
                    if c.health()["status"] == "ready":
                        break
                except Exception:
                    pass
                if time.monotonic() > deadline:
                    logs = "\n".join(p.read_text() for p in sorted(tmp_path.glob("node-*.log")))
                    raise RuntimeError(f"nodes did not start:\n{logs}")
                time.sleep(0.1)
        yield clients
    finally:
        for c in clients:
            c.close()
        for p in procs:
            p.terminate()
        for p in procs:
            try:
                p.wait(timeout=10)
            except subprocess.TimeoutExpired:
                p.kill()


@pytest.mark.slow
def test_criterion_9_end_to_end_service(verdict, socket_nodes):
    clients = socket_nodes
    plaintext = b"end to end over sockets"
    ct = clients[0].scheme("encrypt", scheme="SG02", plaintext=b64(plaintext))["ciphertext"]
    start = time.monotonic()
    ids = {c.submit("decrypt", "SG02", unb64(ct)) for c in clients}
    polls = [c.wait(ids.copy().pop(), timeout=5.0) for c in clients]
    elapsed = time.monotonic() - start
    protocol_ok = len(ids) == 1 and all(result_bytes(p) == plaintext for p in polls) and elapsed <= 5.0

    shares = [c.scheme("partial", scheme="SG02", request=ct)["share"] for c in clients[1:3]]
    valid = all(clients[0].scheme("verify_share", scheme="SG02", request=ct, share=s)["valid"] for s in shares)
    manual = unb64(clients[3].scheme("combine", scheme="SG02", request=ct, shares=shares)["result"])
    verdict(9, "end-to-end service on 4 socket nodes", protocol_ok and valid and manual == plaintext,
            f"all 4 nodes returned the plaintext in {elapsed:.2f}s; manual drive "
            f"{'matches' if manual == plaintext else 'differs'}")


# -- 10 -------------------------------------------------------------------------------

# (rate, throughput, L95 seconds); the knee is where throughput / L95 peaks
KNEE_CURVES = (
    (4, [(1, 1.0, 0.10), (2, 2.0, 0.10), (4, 3.9, 0.11), (8, 5.0, 0.40), (16, 5.1, 2.0)]),
    (1, [(1, 1.0, 0.05), (2, 1.5, 0.20), (4, 1.6, 0.80), (8, 1.6, 3.0)]),
    (64, [(8, 8.0, 0.3), (16, 16.0, 0.3), (32, 32.0, 0.3), (64, 63.0, 0.3), (128, 70.0, 0.9)]),
    (16, [(32, 20.0, 1.0), (2, 2.0, 0.2), (16, 16.0, 0.4), (8, 8.0, 0.4), (4, 4.0, 0.2)]),
    (2, [(1, 1.0, 0.1), (2, 2.0, 0.1), (4, 4.0, 0.2), (8, 7.0, 0.5)]),  # tie 2 vs 4 goes low
)


def test_criterion_10_knee_detection_oracle(verdict):
    got = [knee_capacity(curve) for _, curve in KNEE_CURVES]
    want = [k for k, _ in KNEE_CURVES]
    verdict(10, "knee detection on constructed curves", got == want, f"got {got}, constructed {want}")


if __name__ == "__main__":
    sys.exit(pytest.main([str(Path(__file__)), "-q"]))
