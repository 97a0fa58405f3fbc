"""``ehrgate`` command line interface."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .bench import (
    BenchConfig,
    check_threshold_freeze,
    emit_report,
    run_identify_bench,
    run_roc,
)
from .catalog import load_catalog
from .errors import EhrGateError, InvalidConfig
from .gateway import GatewayService
from .store import RecordStore
from .synth import SynthConfig, gen_enrollee_templates, gen_patient

STORE_ENV = "EHRGATE_STORE_PATH"


def _store_path(option_value):
    return option_value or os.environ.get(STORE_ENV, "ehrgate.db")


@click.group()
def main():
    """Privacy-preserving EHR gateway with biometric emergency access."""


@main.group()
def catalog():
    """Attribute catalog operations."""


@catalog.command("dump")
@click.option("--catalog", "catalog_source", default="default", help="Catalog document or 'default'.")
def catalog_dump(catalog_source):
    """Print the catalog as a JSON document."""
    cat = load_catalog(catalog_source)
    click.echo(json.dumps(cat.to_document(), indent=2))


@main.command()
@click.option("--patients", "n_patients", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def synth(n_patients, seed, out_dir):
    """Emit synthetic template and record fixtures in the wire format."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cat = load_catalog()
    cfg = SynthConfig(seed=seed)
    for i in range(n_patients):
        iris_t, fp_t = gen_enrollee_templates(cfg, i)
        demographics, record_values = gen_patient((seed << 20) + i, cat)
        doc = {
            "demographics": demographics,
            "record_values": record_values,
            "iris_templates": [iris_t.to_wire()],
            "fingerprint_templates": [fp_t.to_wire()],
        }
        (out / f"patient_{i:05d}.json").write_text(json.dumps(doc))
    click.echo(f"wrote {n_patients} fixture files to {out}")


@main.command()
@click.option("--modalities", default="iris,fp", help="Comma list: iris, fp.")
@click.option("--sizes", default="100,200,400,800,1600")
@click.option("--trials", type=int, default=10)
@click.option("--seed", type=int, default=7)
@click.option("--format", "fmt", type=click.Choice(["csv", "text"]), default="text")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def bench(modalities, sizes, trials, seed, fmt, out_path):
    """Identification latency benchmark over synthetic galleries."""
    names = {"iris": "iris", "fp": "fingerprint", "fingerprint": "fingerprint"}
    try:
        mods = tuple(names[m.strip()] for m in modalities.split(","))
    except KeyError as e:
        raise click.BadParameter(f"unknown modality {e}")
    cfg = BenchConfig(
        modalities=mods,
        gallery_sizes=tuple(int(s) for s in sizes.split(",")),
        trials_per_cell=trials,
        seed=seed,
    )
    report = run_identify_bench(cfg)
    doc = emit_report(report, fmt)
    if out_path:
        Path(out_path).write_text(doc)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(doc, nl=False)


@main.command()
@click.option("--modality", type=click.Choice(["iris", "fingerprint", "fp"]), required=True)
@click.option("--thresholds", default="0.05:0.50:0.01", help="start:stop:step grid.")
@click.option("--genuine", type=int, default=1000)
@click.option("--impostor", type=int, default=1000)
@click.option("--seed", type=int, default=7)
@click.option("--format", "fmt", type=click.Choice(["csv", "text"]), default="text")
def roc(modality, thresholds, genuine, impostor, seed, fmt):
    """FAR/FRR sweep; exits nonzero if the frozen default threshold fails calibration."""
    modality = "fingerprint" if modality == "fp" else modality
    try:
        start, stop, step = (float(x) for x in thresholds.split(":"))
    except ValueError:
        raise click.BadParameter("thresholds must be start:stop:step")
    grid = []
    t = start
    while t <= stop + 1e-9:
        grid.append(round(t, 10))
        t += step
    report = run_roc(modality, grid, genuine, impostor, seed=seed)
    click.echo(emit_report(report, fmt), nl=False)
    try:
        check_threshold_freeze(report)
    except InvalidConfig as e:
        click.echo(f"threshold freeze check FAILED: {e}", err=True)
        sys.exit(1)
    click.echo("threshold freeze check passed", err=True)


@main.command("add-doctor")
@click.option("--store", "store_path", default=None, help=f"Store path (or ${STORE_ENV}).")
@click.option("--username", required=True)
@click.option("--password", prompt=True, hide_input=True)
@click.option("--display-name", default="")
def add_doctor(store_path, username, password, display_name):
    """Provision a doctor account (admin-only, no self-signup)."""
    store = RecordStore(_store_path(store_path))
    try:
        store.add_doctor(username, password, display_name)
    except EhrGateError as e:
        raise click.ClickException(str(e))
    click.echo(f"added doctor {username}")


@main.command("audit-export")
@click.option("--store", "store_path", default=None)
def audit_export(store_path):
    """Dump the audit log as CSV."""
    store = RecordStore(_store_path(store_path))
    click.echo(store.export_audit_csv(), nl=False)


@main.command()
@click.option("--listen", default="127.0.0.1:8000", help="host:port")
@click.option("--store", "store_path", default=None)
@click.option("--catalog", "catalog_source", default="default")
@click.option("--session-ttl", type=int, default=15, help="Emergency session TTL, minutes.")
def serve(listen, store_path, catalog_source, session_ttl):
    """Run the HTTP gateway."""
    import uvicorn
    from datetime import timedelta

    from .server import create_app

    host, _, port = listen.partition(":")
    store = RecordStore(_store_path(store_path), catalog=load_catalog(catalog_source))
    service = GatewayService(store, emergency_ttl=timedelta(minutes=session_ttl))
    uvicorn.run(create_app(service), host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
