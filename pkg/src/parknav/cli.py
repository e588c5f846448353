"""Command line interface.

A thin client over the HTTP service: every subcommand sends one request
and writes the response out as CSV (and YAML for `synth`). Without
--server the request is served in-process, so no daemon is needed.

Exit codes: 0 success, 1 validation failure, 2 infeasibility.
"""

from __future__ import annotations

import csv
import os
import sys
from typing import NoReturn, Optional

import click
import yaml

from .client import ServiceClient, ServiceError
from .report import csv_text
from .simulator import METHOD_LABELS
from .strategies import parse_mix

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


def _fail(err: ServiceError) -> NoReturn:
    for line in err.detail_lines():
        click.echo(f"error: {line}", err=True)
    sys.exit(EXIT_INFEASIBLE if err.status_code == 409 else EXIT_INVALID)


def _read_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as e:
        click.echo(f"error: cannot read {path}: {e}", err=True)
        sys.exit(EXIT_INVALID)
    except yaml.YAMLError as e:
        click.echo(f"error: cannot parse {path}: {e}", err=True)
        sys.exit(EXIT_INVALID)
    if not isinstance(doc, dict):
        click.echo(f"error: {path} does not contain a scenario document", err=True)
        sys.exit(EXIT_INVALID)
    return doc


def _write(out_dir: str, name: str, header: list[str], rows: list) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))
    return path


def _minutes(seconds: float) -> str:
    return f"{seconds / 60.0:.2f} min"


@click.group()
@click.option(
    "--server",
    default=None,
    envvar="PARKNAV_SERVER",
    help="Base URL of a running service; defaults to in-process dispatch.",
)
@click.pass_context
def main(ctx: click.Context, server: Optional[str]) -> None:
    """Parking assignment optimizer and search-behaviour simulator."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--lots", type=int, default=21, show_default=True)
@click.option("--spaces", type=int, default=3992, show_default=True, help="Total capacity.")
@click.option("--entries", type=int, default=12, show_default=True)
@click.option("--demand", type=int, default=None, help="Defaults to total capacity.")
@click.option("--allow-overflow", is_flag=True, default=False)
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True)
@click.option("--name", default="scenario", show_default=True, help="Output file stem.")
@click.pass_obj
def synth(
    client: ServiceClient,
    seed: int,
    lots: int,
    spaces: int,
    entries: int,
    demand: Optional[int],
    allow_overflow: bool,
    out: str,
    name: str,
) -> None:
    """Generate a synthetic scenario file."""
    try:
        resp = client.synth(
            seed=seed,
            n_lots=lots,
            total_capacity=spaces,
            n_entries=entries,
            demand=demand,
            allow_overflow=allow_overflow,
        )
    except ServiceError as e:
        _fail(e)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"{name}.yaml")
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(resp["scenario"], fh, sort_keys=False)
    doc = resp["scenario"]
    click.echo(
        f"wrote {path}: {len(doc['lots'])} lots, "
        f"{sum(l['capacity'] for l in doc['lots'])} spaces, "
        f"{len(doc['entries'])} entries, demand {doc['demand_K']}"
    )


@main.command()
@click.argument("scenario_file", type=str)
@click.pass_obj
def validate(client: ServiceClient, scenario_file: str) -> None:
    """Check a scenario file; exit 1 listing violations if invalid."""
    doc = _read_doc(scenario_file)
    try:
        resp = client.validate(doc)
    except ServiceError as e:
        _fail(e)
    if not resp["valid"]:
        for v in resp["violations"]:
            click.echo(f"violation: {v}", err=True)
        sys.exit(EXIT_INVALID)
    click.echo(
        f"{scenario_file} OK: {len(doc.get('lots', []))} lots, "
        f"{len(doc.get('entries', []))} entries, demand {doc.get('demand_K')}"
    )


@main.command()
@click.argument("scenario_file", type=str)
@click.option(
    "--mode",
    type=click.Choice(["exact_fill", "at_most", "auto"]),
    default="at_most",
    show_default=True,
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--occupancy", type=float, default=None, help="Planning occupancy override in [0, 1].")
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True)
@click.pass_obj
def optimize(
    client: ServiceClient,
    scenario_file: str,
    mode: str,
    seed: int,
    occupancy: Optional[float],
    out: str,
) -> None:
    """Solve the vehicle-to-lot assignment for a seeded fleet."""
    doc = _read_doc(scenario_file)
    try:
        resp = client.optimize(doc, seed=seed, mode=mode, planning_occupancy=occupancy)
    except ServiceError as e:
        _fail(e)
    header = ["vehicle_id", "lot_id", "drive_s", "search_s", "walk_s", "total_s"]
    rows = [[r[c] for c in header] for r in resp["rows"]]
    path = _write(out, "assignment.csv", header, rows)
    click.echo(
        f"wrote {path}: {len(rows)} vehicles, mode {resp['mode']}, "
        f"mean cost {_minutes(resp['mean_cost_s'])}"
    )


def _read_assignment_csv(path: str) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"vehicle_id", "lot_id"} <= set(reader.fieldnames):
                click.echo(
                    f"error: {path} needs vehicle_id and lot_id columns", err=True
                )
                sys.exit(EXIT_INVALID)
            return {row["vehicle_id"]: row["lot_id"] for row in reader}
    except OSError as e:
        click.echo(f"error: cannot read {path}: {e}", err=True)
        sys.exit(EXIT_INVALID)


@main.command()
@click.argument("scenario_file", type=str)
@click.option("--method", type=click.Choice(list(METHOD_LABELS)), default=None)
@click.option("--mix", "mix_spec", default=None, help="e.g. G1=0.25,G2=0.25,G3=0.25,G4=0.25")
@click.option(
    "--assignment",
    "assignment_csv",
    type=str,
    default=None,
    help="CSV with vehicle_id,lot_id columns to replay.",
)
@click.option("--runs", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--parallel", is_flag=True, default=False)
@click.option("--overhead", type=float, default=0.0, show_default=True, help="Full-detection overhead seconds.")
@click.option("--no-reservation", is_flag=True, default=False)
@click.option("--infinite-patience", is_flag=True, default=False)
@click.option("--events", "events_path", type=str, default=None, help="Also write an event log CSV here.")
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True)
@click.pass_obj
def simulate(
    client: ServiceClient,
    scenario_file: str,
    method: Optional[str],
    mix_spec: Optional[str],
    assignment_csv: Optional[str],
    runs: int,
    seed: int,
    parallel: bool,
    overhead: float,
    no_reservation: bool,
    infinite_patience: bool,
    events_path: Optional[str],
    out: str,
) -> None:
    """Run seeded simulations and write per-run and aggregate CSVs."""
    doc = _read_doc(scenario_file)
    given = [x for x in (method, mix_spec, assignment_csv) if x is not None]
    if len(given) > 1:
        click.echo("error: give at most one of --method, --mix, --assignment", err=True)
        sys.exit(EXIT_INVALID)
    options: dict = {
        "runs": runs,
        "seed": seed,
        "parallel": parallel,
        "full_detect_overhead": overhead,
        "reservation": not no_reservation,
        "infinite_patience": infinite_patience,
        "include_events": events_path is not None,
    }
    if method is not None:
        options["method"] = method
    elif mix_spec is not None:
        try:
            mix = parse_mix(mix_spec)
        except ValueError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_INVALID)
        options["mix"] = {kind.value: w for kind, w in mix.items()}
    elif assignment_csv is not None:
        options["assignment"] = _read_assignment_csv(assignment_csv)
    try:
        resp = client.simulate(doc, **options)
    except ServiceError as e:
        _fail(e)

    lot_ids = [lot["id"] for lot in doc["lots"]]
    summary = resp["summary"]

    run_header = ["run", "seed", "parked", "abandoned", "failed_total", "mean_rerouting_s"]
    _write(out, "runs.csv", run_header, [[r[c] for c in run_header] for r in resp["runs"]])

    fs_header = ["run", "seed", *lot_ids, "total"]
    fs_rows = [
        [r["run"], r["seed"], *(r["failed_searches"][lot] for lot in lot_ids), r["failed_total"]]
        for r in resp["runs"]
    ]
    _write(out, "failed_searches.csv", fs_header, fs_rows)

    conv_header = ["n", "mean_rerouting_s", "rerouting_rel_change", "failed_profile_drift"]
    _write(
        out,
        "convergence.csv",
        conv_header,
        [[c[k] for k in conv_header] for c in resp["convergence"]],
    )

    sum_header = [
        "n_runs", "fleet_size", "mean_parked", "mean_abandoned", "abandonment_rate",
        "mean_rerouting_s", "mean_failed_total", "mean_drive_s", "mean_search_s",
        "mean_walk_s",
    ]
    _write(out, "summary.csv", sum_header, [[summary[k] for k in sum_header]])

    if resp.get("vehicles") is not None:
        veh_header = [
            "run", "vehicle_id", "entry_id", "strategy", "arrival_s", "attempts",
            "parked_lot", "parked_floor", "rerouting_s", "drive_s", "search_s",
            "walk_s", "abandoned",
        ]
        veh_rows = [
            [int(v[c]) if c == "abandoned" else v[c] for c in veh_header]
            for v in resp["vehicles"]
        ]
        _write(out, "vehicles.csv", veh_header, veh_rows)

    if events_path is not None:
        ev_header = ["run", "time_s", "vehicle_id", "event", "lot_id", "floor"]
        ev_rows = [[e[c] for c in ev_header] for e in resp.get("events") or []]
        parent = os.path.dirname(events_path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(events_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text(ev_header, ev_rows))

    click.echo(
        f"{summary['n_runs']} run(s), fleet {summary['fleet_size']}: "
        f"parked {summary['mean_parked']:.1f}, abandoned {summary['mean_abandoned']:.1f}, "
        f"mean rerouting {_minutes(summary['mean_rerouting_s'])}, "
        f"failed searches {summary['mean_failed_total']:.1f}/run"
    )


@main.command()
@click.argument("scenario_file", type=str)
@click.option(
    "--methods",
    default=",".join(METHOD_LABELS),
    show_default=True,
    help="Comma-separated method labels.",
)
@click.option("--runs", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--parallel", is_flag=True, default=False)
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True)
@click.pass_obj
def compare(
    client: ServiceClient,
    scenario_file: str,
    methods: str,
    runs: int,
    seed: int,
    parallel: bool,
    out: str,
) -> None:
    """Compare methods over a common seed stream."""
    doc = _read_doc(scenario_file)
    labels = [m.strip() for m in methods.split(",") if m.strip()]
    try:
        resp = client.compare(doc, labels, runs=runs, seed=seed, parallel=parallel)
    except ServiceError as e:
        _fail(e)
    header = [
        "method", "runs", "mean_rerouting_min", "failed_search_total",
        "abandonment_rate", "parked_fraction",
    ]
    rows = [[r[c] for c in header] for r in resp["rows"]]
    path = _write(out, "comparison.csv", header, rows)
    click.echo(f"wrote {path}")
    width = max(len(r["method"]) for r in resp["rows"])
    for r in resp["rows"]:
        click.echo(
            f"  {r['method']:<{width}}  rerouting {r['mean_rerouting_min']:.2f} min  "
            f"failed {r['failed_search_total']}  "
            f"abandoned {100 * r['abandonment_rate']:.1f}%"
        )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
