"""Result tables, plotting series and comparative-statics reports.

Tables follow the layout of the published case-study tables: one row per EU
with a DR column and an EU-price column per interval, and one row per
program with its UC price per interval. Every number is rendered with six
significant digits, so files are byte-stable across runs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

from drgame.uc import EquilibriumResult

DEADBAND = 1e-9


def fmt(x: float) -> str:
    """Six significant digits, round-half-even on the binary value."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in report")
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


def _interval_keys(labels) -> list[str]:
    """Column suffixes per interval; repeated labels get their index appended."""
    return [lab if list(labels).count(lab) == 1 else f"{lab}#{t}" for t, lab in enumerate(labels)]


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass(frozen=True)
class ReportBundle:
    eu_table: Table
    provider_table: Table
    series: Table
    kkt_report: Table


def eu_table(result: EquilibriumResult) -> Table:
    keys = _interval_keys([iv.label for iv in result.intervals])
    columns = ("eu_id", *(f"dr_kw_{k}" for k in keys), *(f"lambda_eu_{k}" for k in keys))
    rows = []
    if result.intervals:
        first = result.intervals[0]
        for p_index, pr in enumerate(first.program_responses):
            for j, er in enumerate(pr.eu_responses):
                per_interval = [iv.program_responses[p_index].eu_responses[j] for iv in result.intervals]
                rows.append((er.eu_id, *(r.p_dr for r in per_interval), *(r.lambda_eu for r in per_interval)))
    return Table(columns, tuple(rows))


def provider_table(result: EquilibriumResult) -> Table:
    keys = _interval_keys([iv.label for iv in result.intervals])
    columns = ("program_id", *(f"lambda_dr_{k}" for k in keys))
    rows = []
    if result.intervals:
        for p_index, pr in enumerate(result.intervals[0].program_responses):
            rows.append((pr.program_id, *(iv.program_responses[p_index].lambda_dr for iv in result.intervals)))
    return Table(columns, tuple(rows))


SERIES_COLUMNS = ("scenario", "interval", "entity", "entity_id", "quantity", "value")


def series_table(results) -> Table:
    """Long-format series: EU profit, program DR and profit, UC profit."""
    rows = []
    for res in results:
        keys = _interval_keys([iv.label for iv in res.intervals])
        for key, iv in zip(keys, res.intervals):
            for pr in iv.program_responses:
                for er in pr.eu_responses:
                    rows.append((res.scenario_name, key, "eu", er.eu_id, "eu_profit", er.eu_profit))
            for pr in iv.program_responses:
                rows.append((res.scenario_name, key, "program", pr.program_id, "aggregate_dr", pr.aggregate_dr))
                rows.append((res.scenario_name, key, "program", pr.program_id, "provider_profit", pr.provider_profit))
            rows.append((res.scenario_name, key, "uc", "uc", "uc_profit", iv.uc_profit))
    return Table(SERIES_COLUMNS, tuple(rows))


def kkt_table(result: EquilibriumResult) -> Table:
    """Largest KKT residuals per EU over all intervals."""
    columns = ("eu_id", "stationarity", "complementarity", "bounds", "max_residual")
    order: list[str] = []
    worst: dict[str, list[float]] = {}
    for k in result.kkt:
        if k.eu_id not in worst:
            order.append(k.eu_id)
            worst[k.eu_id] = [0.0, 0.0, 0.0, 0.0]
        w = worst[k.eu_id]
        w[0] = max(w[0], abs(k.stationarity))
        w[1] = max(w[1], abs(k.comp_lower), abs(k.comp_upper))
        w[2] = max(w[2], k.bounds)
        w[3] = max(w[3], k.max_residual)
    return Table(columns, tuple((eu, *worst[eu]) for eu in order))


def build_bundle(result: EquilibriumResult, extra_results=()) -> ReportBundle:
    return ReportBundle(
        eu_table(result),
        provider_table(result),
        series_table([result, *extra_results]),
        kkt_table(result),
    )


def _render_cell(v):
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_render_cell(v) for v in row])
    return buf.getvalue()


def render_json(table: Table) -> str:
    records = [
        {c: (float(fmt(v)) if isinstance(v, float) else v) for c, v in zip(table.columns, row)}
        for row in table.rows
    ]
    return json.dumps({"columns": list(table.columns), "rows": records}, indent=2, allow_nan=False) + "\n"


def _write(table: Table, name: str, fmt_name: str, out_dir: Path) -> Path:
    path = out_dir / f"{name}.{fmt_name}"
    text = render_csv(table) if fmt_name == "csv" else render_json(table)
    path.write_text(text, encoding="utf-8", newline="")
    return path


def _ensure_dir(out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def emit_tables(bundle: ReportBundle, fmt_name: str, out_dir) -> list[Path]:
    """Write eu_table, provider_table, series and kkt_report files."""
    if fmt_name not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt_name!r}")
    out = _ensure_dir(out_dir)
    return [
        _write(bundle.eu_table, "eu_table", fmt_name, out),
        _write(bundle.provider_table, "provider_table", fmt_name, out),
        _write(bundle.series, "series", fmt_name, out),
        _write(bundle.kkt_report, "kkt_report", fmt_name, out),
    ]


def emit_series(results, out_dir, fmt_name: str = "csv") -> list[Path]:
    if not results:
        raise ValueError("need at least one result")
    out = _ensure_dir(out_dir)
    return [_write(series_table(results), "series", fmt_name, out)]


# comparative statics -------------------------------------------------------


def direction(before: float, after: float, deadband: float = DEADBAND) -> str:
    diff = after - before
    if diff > deadband:
        return "increase"
    if diff < -deadband:
        return "decrease"
    return "unchanged"


@dataclass(frozen=True)
class Change:
    interval: str
    entity: str
    entity_id: str
    quantity: str
    before: float
    after: float

    @property
    def direction(self) -> str:
        return direction(self.before, self.after)


def compare_results(a: EquilibriumResult, b: EquilibriumResult) -> list[Change]:
    """Directions of change from ``a`` to ``b`` for every shared entity.

    Entities are matched by id and intervals by position; entities present
    in only one result are skipped.
    """
    changes = []
    keys = _interval_keys([iv.label for iv in a.intervals])
    for key, ia, ib in zip(keys, a.intervals, b.intervals):
        programs_b = {pr.program_id: pr for pr in ib.program_responses}
        for pa in ia.program_responses:
            pb = programs_b.get(pa.program_id)
            if pb is None:
                continue
            eus_b = {er.eu_id: er for er in pb.eu_responses}
            for ea in pa.eu_responses:
                eb = eus_b.get(ea.eu_id)
                if eb is None:
                    continue
                changes.append(Change(key, "eu", ea.eu_id, "dr", ea.p_dr, eb.p_dr))
                changes.append(Change(key, "eu", ea.eu_id, "eu_profit", ea.eu_profit, eb.eu_profit))
                changes.append(Change(key, "eu", ea.eu_id, "lambda_eu", ea.lambda_eu, eb.lambda_eu))
            changes.append(Change(key, "program", pa.program_id, "aggregate_dr", pa.aggregate_dr, pb.aggregate_dr))
            changes.append(Change(key, "program", pa.program_id, "lambda_dr", pa.lambda_dr, pb.lambda_dr))
            changes.append(Change(key, "program", pa.program_id, "provider_profit", pa.provider_profit, pb.provider_profit))
        changes.append(Change(key, "uc", "uc", "uc_profit", ia.uc_profit, ib.uc_profit))
    changes.append(Change("total", "uc", "uc", "uc_profit", a.uc_profit, b.uc_profit))
    return changes


def render_changes(a_name: str, b_name: str, changes) -> str:
    lines = [f"comparative statics {a_name} -> {b_name} (deadband {DEADBAND:g})"]
    for c in changes:
        who = "UC" if c.entity == "uc" else f"{'EU' if c.entity == 'eu' else 'program'} {c.entity_id}"
        lines.append(f"{c.interval:>14}  {who:<24} {c.quantity:<16} {c.direction}")
    return "\n".join(lines) + "\n"


def changes_json(a_name: str, b_name: str, changes) -> str:
    rows = [
        {
            "interval": c.interval, "entity": c.entity, "entity_id": c.entity_id,
            "quantity": c.quantity, "direction": c.direction,
            "before": float(fmt(c.before)), "after": float(fmt(c.after)),
        }
        for c in changes
    ]
    return json.dumps({"from": a_name, "to": b_name, "changes": rows}, indent=2) + "\n"
