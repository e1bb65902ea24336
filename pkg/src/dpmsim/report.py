"""Render a finished run for people and for downstream tooling.

Three formats, all deterministic down to the byte:

* ``csv``  - the per-cycle ledger, one row per accounting cycle.
* ``json`` - the full report minus the event trace.
* ``text`` - a terminal-friendly summary with the component breakdown.

The event trace is large and has its own renderer (format_trace in the
engine module); it is never embedded in these documents.
"""

from __future__ import annotations

import csv
import io
import json

from .engine import Report
from .scenario import canonical_dict

FORMATS = ("csv", "json", "text")

CYCLE_COLUMNS = ("cycle", "start_us", "consumed_nJ", "harvested_nJ", "net_nJ", "end_soc")


def emit_cycles_csv(report: Report) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CYCLE_COLUMNS)
    for row in report.cycles:
        writer.writerow(
            [row.index, row.start_us, repr(row.consumed_nj), repr(row.harvested_nj),
             repr(row.net_nj), repr(row.end_soc)]
        )
    return out.getvalue()


def report_dict(report: Report) -> dict:
    """The JSON document shape; insertion order is the canonical order."""
    return {
        "scenario": canonical_dict(report.scenario),
        "duration_us": report.duration_us,
        "final": {
            "mode": report.final_mode,
            "soc": report.final_soc,
            "voltage_uv": report.final_voltage.uv,
            "e_store_nj": report.e_store_final.nj,
        },
        "energy": {
            "initial_store_nj": report.e_store_initial.nj,
            "harvested_nj": report.e_harvested.nj,
            "consumed_nj": {name: e.nj for name, e in report.e_consumed},
            "consumed_total_nj": report.e_consumed_total.nj,
            "overcharge_discarded_nj": report.e_overcharge_discarded.nj,
            "net_gain_nj": report.net_gain.nj,
        },
        "mode_residency_us": {name: d.us for name, d in report.mode_residency},
        "cycles_completed": report.cycles_completed,
        "cycles": [
            {
                "cycle": row.index,
                "start_us": row.start_us,
                "consumed_nj": row.consumed_nj,
                "harvested_nj": row.harvested_nj,
                "net_nj": row.net_nj,
                "end_soc": row.end_soc,
            }
            for row in report.cycles
        ],
        "anomalies": [
            {"time_us": a.time_us, "code": a.code, "detail": a.detail}
            for a in report.anomalies
        ],
        "scenario_warnings": list(report.scenario.warnings),
    }


def emit_json(report: Report) -> str:
    return json.dumps(report_dict(report), indent=2) + "\n"


def _mj(nj: float) -> str:
    return f"{nj / 1e6:.6f} mJ"


def emit_text(report: Report) -> str:
    s = report.scenario
    lines: list[str] = []
    lines.append(f"run summary: {s.name}")
    lines.append(f"  variant         {s.dpm_variant.kind.value}")
    lines.append(f"  duration        {report.duration_us / 1e6:.6f} s")
    lines.append(f"  final mode      {report.final_mode}")
    lines.append(f"  final soc       {report.final_soc:.6f}")
    lines.append(f"  final voltage   {report.final_voltage.volts:.6f} V")
    lines.append("")
    lines.append("energy ledger")
    lines.append(f"  harvested       {_mj(report.e_harvested.nj)}")
    for name, e in report.e_consumed:
        lines.append(f"    {name:<18}{_mj(e.nj)}")
    lines.append(f"  consumed        {_mj(report.e_consumed_total.nj)}")
    lines.append(f"  discarded       {_mj(report.e_overcharge_discarded.nj)}")
    lines.append(f"  net gain        {_mj(report.net_gain.nj)}")
    lines.append(f"  store change    {_mj(report.e_store_final.nj - report.e_store_initial.nj)}")
    lines.append("")
    lines.append("wake cycles")
    lines.append(f"  completed       {report.cycles_completed}")
    lines.append(f"  ledger rows     {len(report.cycles)}")
    if report.cycles:
        mean_net = sum(r.net_nj for r in report.cycles) / len(report.cycles)
        lines.append(f"  mean net/cycle  {_mj(mean_net)}")
    lines.append("")
    lines.append("mode residency")
    for name, d in report.mode_residency:
        lines.append(f"  {name:<14}{d.us / 1e6:.6f} s")
    lines.append("")
    if report.anomalies:
        lines.append(f"anomalies ({len(report.anomalies)})")
        for a in report.anomalies:
            lines.append(f"  t={a.time_us}us {a.code}: {a.detail}")
    else:
        lines.append("anomalies: none")
    if report.scenario.warnings:
        lines.append("")
        lines.append(f"scenario warnings ({len(report.scenario.warnings)})")
        for w in report.scenario.warnings:
            lines.append(f"  {w}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "text") -> str:
    if fmt == "csv":
        return emit_cycles_csv(report)
    if fmt == "json":
        return emit_json(report)
    if fmt == "text":
        return emit_text(report)
    raise ValueError(f"unknown report format {fmt!r} (expected one of {FORMATS})")
