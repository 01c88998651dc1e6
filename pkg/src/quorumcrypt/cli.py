"""Command line: node process, dealer, benchmark and a thin RPC client."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .schemes.core import b64, unb64


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Threshold-cryptography nodes, dealer and benchmark."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--keys", "key_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--index", type=int, default=None, help="Party index, if the config has no self_index.")
def node(config_path, key_dir, index):
    """Run one node until interrupted."""
    from .network.config import ConfigError
    from .schemes.errors import MalformedError
    from .service.node import run_node

    try:
        run_node(config_path, key_dir, index)
    except (ConfigError, MalformedError, OSError) as exc:
        raise click.ClickException(f"startup failed: {exc}") from exc
    except KeyboardInterrupt:
        pass


@main.command()
@click.option("--scheme", required=True, help="SG02, BZ03, SH00, KG20, BLS04, CKS05, or AUTH for MAC keys.")
@click.option("--n", "n", required=True, type=int)
@click.option("--t", "t", required=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=None, help="Hex seed for reproducible dealing.")
@click.option("--key-id", default="default", show_default=True)
@click.option("--rsa-bits", type=click.Choice(["512", "1024", "2048", "4096"]), default=None,
              help="SH00 modulus size (default 2048).")
def deal(scheme, n, t, out_dir, seed, key_id, rsa_bits):
    """Deal key files for one scheme."""
    from .schemes.errors import ThresholdError
    from .service.dealer import deal as run_deal

    try:
        paths = run_deal(scheme, n, t, out_dir, seed, key_id=key_id, rsa_bits=int(rsa_bits) if rsa_bits else None)
    except (ThresholdError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    for p in paths:
        click.echo(str(p))


@main.group()
def bench():
    """Benchmark on a simulated cluster."""


@bench.command("run")
@click.option("--plan", "plan_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--no-plots", is_flag=True, help="Only write CSV and JSON.")
@click.option("--samples", is_flag=True, help="Also write the raw latency samples per scheme.")
def bench_run(plan_path, out_dir, no_plots, samples):
    """Run the rate ladder of a plan and write report.csv, plots and summary.json."""
    from .bench import ExperimentPlan, emit_report, run_experiment, sample_records, save_samples
    from .network.config import load_preset

    plan = ExperimentPlan.load(plan_path)

    def progress(r):
        click.echo(f"{r.scheme:6} rate={r.rate:<5} completed={r.completed}/{r.submitted} "
                   f"throughput={r.throughput:.3f} L95={r.network.l95 * 1000:.3f}ms", err=True)

    report = run_experiment(plan, progress)
    for path in emit_report(report, out_dir, plots=not no_plots):
        click.echo(str(path))
    if samples:
        preset = load_preset(plan.preset)
        t = preset.t if preset.t is not None else (preset.n - 1) // 3
        for record in sample_records(report, preset.n, t):
            path = Path(out_dir) / f"samples-{record['scheme']}.json"
            save_samples(record, path)
            click.echo(str(path))


@bench.command("replay")
@click.option("--samples", "paths", required=True, multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--usable-factor", default=5.0, show_default=True)
def bench_replay(paths, out_dir, usable_factor):
    """Recompute the report from recorded samples."""
    from .bench import ExperimentPlan, emit_report, load_samples, replay
    from .bench.runner import BenchReport

    records = [load_samples(p) for p in paths]
    first = records[0]
    plan = ExperimentPlan(first.get("preset", "local-7"), tuple(r["scheme"] for r in records),
                          rates=tuple(s["rate"] for s in first["steps"]), duration_s=first["duration_s"],
                          usable_factor=usable_factor)
    report = BenchReport(plan, [replay(r, usable_factor) for r in records])
    for path in emit_report(report, out_dir, plots=False):
        click.echo(str(path))


@main.group()
def config():
    """Generate node configuration files."""


@config.command("loopback")
@click.option("--n", "n", required=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--base-port", default=7100, show_default=True)
@click.option("--rpc-base-port", default=8100, show_default=True)
@click.option("--auth", is_flag=True, help="Require pairwise MACs (deal --scheme AUTH first).")
@click.option("--tob", is_flag=True, help="Enable total-order broadcast.")
@click.option("--forward-requests", is_flag=True, help="Relay client requests to all peers.")
def config_loopback(n, out_dir, base_port, rpc_base_port, auth, tob, forward_requests):
    """One config per node, all on 127.0.0.1."""
    from .network.config import loopback_config

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = loopback_config(n, base_port=base_port, rpc_base_port=rpc_base_port, auth_enabled=auth, tob_enabled=tob,
                          node={"forward_requests": True} if forward_requests else {})
    for i in range(1, n + 1):
        path = out / f"node-{i}.json"
        cfg.for_node(i).save(path)
        click.echo(str(path))


# -- client ----------------------------------------------------------------------------


@main.group()
@click.option("--node", "address", default="127.0.0.1:8101", show_default=True, help="host:port of a node's RPC.")
@click.pass_context
def client(ctx, address):
    """Talk to a running node."""
    ctx.obj = address


def _client(ctx):
    from .service.client import Client

    return Client(ctx.obj)


def _payload(text, path, b64text):
    given = [x is not None for x in (text, path, b64text)]
    if sum(given) != 1:
        raise click.UsageError("give exactly one of --text, --file, --b64")
    if text is not None:
        return text.encode()
    if path is not None:
        return Path(path).read_bytes()
    return unb64(b64text)


def _run(fn):
    from .service.client import RpcClientError

    try:
        out = fn()
    except RpcClientError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(json.dumps(out, indent=2, sort_keys=True))


@client.command("health")
@click.pass_context
def client_health(ctx):
    _run(lambda: _client(ctx).health())


@client.command("submit")
@click.option("--kind", type=click.Choice(["decrypt", "sign", "coin"]), required=True)
@click.option("--scheme", required=True)
@click.option("--key-id", default="default")
@click.option("--text", default=None)
@click.option("--file", "path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--b64", "b64text", default=None)
@click.option("--wait/--no-wait", default=True, show_default=True)
@click.pass_context
def client_submit(ctx, kind, scheme, key_id, text, path, b64text, wait):
    """Submit a request (a decrypt payload is the encoded ciphertext)."""
    payload = _payload(text, path, b64text)

    def go():
        c = _client(ctx)
        iid = c.submit(kind, scheme, payload, key_id)
        return c.wait(iid) if wait else {"instance_id": iid}

    _run(go)


@client.command("poll")
@click.argument("instance_id")
@click.pass_context
def client_poll(ctx, instance_id):
    _run(lambda: _client(ctx).poll(instance_id))


@client.command("encrypt")
@click.option("--scheme", required=True)
@click.option("--key-id", default="default")
@click.option("--label", default="")
@click.option("--text", default=None)
@click.option("--file", "path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--b64", "b64text", default=None)
@click.pass_context
def client_encrypt(ctx, scheme, key_id, label, text, path, b64text):
    """Encrypt with the node's public key; prints the base64 ciphertext."""
    data = _payload(text, path, b64text)
    _run(lambda: _client(ctx).scheme("encrypt", scheme=scheme, key_id=key_id, plaintext=b64(data),
                                     label=b64(label.encode())))


@client.command("scheme")
@click.argument("primitive")
@click.option("--param", "params", multiple=True, help="key=value; value may be JSON.")
@click.pass_context
def client_scheme(ctx, primitive, params):
    """Call a scheme primitive directly."""
    body = {}
    for item in params:
        key, _, value = item.partition("=")
        try:
            body[key] = json.loads(value)
        except json.JSONDecodeError:
            body[key] = value
    _run(lambda: _client(ctx).scheme(primitive, **body))


if __name__ == "__main__":
    sys.exit(main())
