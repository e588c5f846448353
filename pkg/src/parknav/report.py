"""Aggregation and tabular output for simulation results.

Every table builder returns (header, rows) with plain Python values; the
CSV writer formats floats to six significant digits so identical inputs
produce byte-identical files regardless of platform float repr quirks.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .assignment import Assignment, CostMatrix
from .simulator import MethodComparison, SimOutcome

Header = list[str]
Row = Sequence[object]


@dataclass(frozen=True)
class Summary:
    n_runs: int
    fleet_size: int
    mean_parked: float
    mean_abandoned: float
    abandonment_rate: float
    mean_rerouting_s: float
    mean_failed_total: float
    per_lot_failed_mean: Mapping[str, float]
    mean_drive_s: float
    mean_search_s: float
    mean_walk_s: float


def summarize(outcomes: Sequence[SimOutcome]) -> Summary:
    """Pool per-vehicle statistics across runs.

    Rerouting is averaged over non-abandoned vehicles; drive/search/walk
    over parked vehicles; counts are per-run means.
    """
    if not outcomes:
        raise ValueError("summarize needs at least one outcome")
    n = len(outcomes)
    fleet = len(outcomes[0].records)
    parked = [r for o in outcomes for r in o.records if not r.abandoned]
    total_vehicles = sum(len(o.records) for o in outcomes)
    lot_ids = list(outcomes[0].failed_searches)
    return Summary(
        n_runs=n,
        fleet_size=fleet,
        mean_parked=sum(o.parked_count for o in outcomes) / n,
        mean_abandoned=sum(o.abandonment_count for o in outcomes) / n,
        abandonment_rate=sum(o.abandonment_count for o in outcomes) / total_vehicles,
        mean_rerouting_s=(
            sum(r.rerouting_time for r in parked) / len(parked) if parked else 0.0
        ),
        mean_failed_total=sum(sum(o.failed_searches.values()) for o in outcomes) / n,
        per_lot_failed_mean={
            lot: sum(o.failed_searches[lot] for o in outcomes) / n for lot in lot_ids
        },
        mean_drive_s=(sum(r.total_drive_time for r in parked) / len(parked) if parked else 0.0),
        mean_search_s=(sum(r.total_search_time for r in parked) / len(parked) if parked else 0.0),
        mean_walk_s=(sum(r.walk_time for r in parked) / len(parked) if parked else 0.0),
    )


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    mean_rerouting_s: float
    rerouting_rel_change: Optional[float]
    failed_profile_drift: Optional[float]


def _rel_change(prev: float, curr: float) -> float:
    if prev == 0.0:
        return 0.0 if curr == 0.0 else math.inf
    return abs(curr - prev) / abs(prev)


def convergence_series(outcomes: Sequence[SimOutcome]) -> list[ConvergenceRow]:
    """Running means over the run sequence and their step-to-step drift.

    Row n holds the mean over the first n runs of the per-run rerouting
    mean and its relative change from row n-1, plus the drift of the
    per-lot failed-search running-mean vector. The vector drift is the
    sup-norm relative change, max_lot |delta mean| / max_lot prev mean:
    dividing each lot by its own mean would make a lot that sees one
    failure in thirty runs dominate, so the profile is measured against
    the scale of the busiest lot. Row 1 has no predecessor, so its
    changes are None.
    """
    if not outcomes:
        raise ValueError("convergence_series needs at least one outcome")
    lot_ids = list(outcomes[0].failed_searches)
    rows: list[ConvergenceRow] = []
    reroute_sum = 0.0
    failed_sum = {lot: 0 for lot in lot_ids}
    prev_reroute: Optional[float] = None
    prev_failed: Optional[dict[str, float]] = None
    for n, o in enumerate(outcomes, start=1):
        reroute_sum += o.mean_rerouting_time
        reroute_mean = reroute_sum / n
        for lot in lot_ids:
            failed_sum[lot] += o.failed_searches[lot]
        failed_mean = {lot: failed_sum[lot] / n for lot in lot_ids}
        if prev_reroute is None:
            rows.append(ConvergenceRow(n, reroute_mean, None, None))
        else:
            delta = max(abs(failed_mean[lot] - prev_failed[lot]) for lot in lot_ids)
            scale = max(prev_failed.values())
            rows.append(
                ConvergenceRow(
                    n,
                    reroute_mean,
                    _rel_change(prev_reroute, reroute_mean),
                    _rel_change_scaled(delta, scale),
                )
            )
        prev_reroute = reroute_mean
        prev_failed = failed_mean
    return rows


def _rel_change_scaled(delta: float, scale: float) -> float:
    if scale == 0.0:
        return 0.0 if delta == 0.0 else math.inf
    return delta / scale


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def runs_table(outcomes: Sequence[SimOutcome]) -> tuple[Header, list[Row]]:
    header = ["run", "seed", "parked", "abandoned", "failed_total", "mean_rerouting_s"]
    rows: list[Row] = [
        (
            i,
            o.seed,
            o.parked_count,
            o.abandonment_count,
            sum(o.failed_searches.values()),
            o.mean_rerouting_time,
        )
        for i, o in enumerate(outcomes)
    ]
    return header, rows


def vehicles_table(outcome: SimOutcome) -> tuple[Header, list[Row]]:
    header = [
        "vehicle_id", "entry_id", "strategy", "arrival_s", "attempts",
        "parked_lot", "parked_floor", "rerouting_s", "drive_s", "search_s",
        "walk_s", "abandoned",
    ]
    rows: list[Row] = [
        (
            r.vehicle_id,
            r.entry_id,
            r.strategy.value,
            r.actual_arrival,
            len(r.attempts),
            r.parked_lot,
            r.parked_floor,
            r.rerouting_time,
            r.total_drive_time,
            r.total_search_time,
            r.walk_time,
            int(r.abandoned),
        )
        for r in outcome.records
    ]
    return header, rows


def failed_matrix_table(
    outcomes: Sequence[SimOutcome], lot_ids: Sequence[str]
) -> tuple[Header, list[Row]]:
    """Per-run failed-search counts, one column per lot plus a total."""
    header = ["run", "seed", *lot_ids, "total"]
    rows: list[Row] = []
    for i, o in enumerate(outcomes):
        counts = [o.failed_searches[lot] for lot in lot_ids]
        rows.append((i, o.seed, *counts, sum(counts)))
    return header, rows


def convergence_table(outcomes: Sequence[SimOutcome]) -> tuple[Header, list[Row]]:
    header = ["n", "mean_rerouting_s", "rerouting_rel_change", "failed_profile_drift"]
    rows: list[Row] = [
        (c.n, c.mean_rerouting_s, c.rerouting_rel_change, c.failed_profile_drift)
        for c in convergence_series(outcomes)
    ]
    return header, rows


def comparison_table(rows: Sequence[MethodComparison]) -> tuple[Header, list[Row]]:
    header = [
        "method", "runs", "mean_rerouting_min", "failed_search_total",
        "abandonment_rate", "parked_fraction",
    ]
    out: list[Row] = [
        (
            c.label,
            c.n_runs,
            c.mean_rerouting_min,
            c.failed_search_total,
            c.abandonment_rate,
            c.parked_fraction,
        )
        for c in rows
    ]
    return header, out


def assignment_table(
    assignment: Assignment, cost: CostMatrix
) -> tuple[Header, list[Row]]:
    header = ["vehicle_id", "lot_id", "drive_s", "search_s", "walk_s", "total_s"]
    col = {lot: j for j, lot in enumerate(cost.lot_ids)}
    rows: list[Row] = []
    for i, vid in enumerate(cost.vehicle_ids):
        lot = assignment.lot_of[vid]
        j = col[lot]
        rows.append(
            (
                vid,
                lot,
                float(cost.drive_s[i, j]),
                float(cost.search_s[i, j]),
                float(cost.walk_s[i, j]),
                float(cost.drive_s[i, j] + cost.search_s[i, j] + cost.walk_s[i, j]),
            )
        )
    return header, rows


def events_table(outcomes: Sequence[SimOutcome]) -> tuple[Header, list[Row]]:
    """Event logs of all runs that collected them, prefixed by run index."""
    header = ["run", "time_s", "vehicle_id", "event", "lot_id", "floor"]
    rows: list[Row] = []
    for i, o in enumerate(outcomes):
        for e in o.events or ():
            rows.append((i, *e))
    return header, rows


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def _fmt(value: object) -> object:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return value


def csv_text(header: Header, rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path: str, header: Header, rows: Sequence[Row]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))
