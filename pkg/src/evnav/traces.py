"""CSV trace and summary emission.

Floats are written with repr-style shortest representation, so re-parsing
a trace and prefix-summing the instant-regret column reproduces the
cumulative column bit for bit.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .sim import SessionRecord

TRACE_COLUMNS = [
    "run_id",
    "agent_id",
    "session",
    "path_edge_count",
    "observed_cost_wh",
    "true_expected_cost_wh",
    "instant_regret_wh",
    "cumulative_regret_wh",
]

SUMMARY_COLUMNS = [
    "scenario",
    "agent",
    "fleet_size",
    "horizon",
    "seeds",
    "final_cumulative_regret_mean",
    "final_cumulative_regret_std",
]


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file and rename, so partial files never appear."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_rows(run_id: str, per_agent_records: list[list[SessionRecord]]):
    """Flatten fleet records into trace rows with running regret sums."""
    rows = []
    for records in per_agent_records:
        total = 0.0
        for rec in records:
            total += rec.instant_regret_wh
            rows.append(
                (
                    run_id,
                    rec.agent_id,
                    rec.session,
                    len(rec.path),
                    rec.observed_cost_wh,
                    rec.true_expected_cost_wh,
                    rec.instant_regret_wh,
                    total,
                )
            )
    return rows


def render_csv(columns, rows) -> str:
    """CSV text with str()-formatted cells (floats round-trip exactly)."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(str(cell) for cell in row))
    return "\n".join(lines) + "\n"


def write_trace_csv(path, rows) -> None:
    atomic_write_text(path, render_csv(TRACE_COLUMNS, rows))


def read_trace_csv(path):
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRACE_COLUMNS:
            raise ValueError(f"{path}: expected columns {TRACE_COLUMNS}, got {reader.fieldnames}")
        for rec in reader:
            out.append(
                {
                    "run_id": rec["run_id"],
                    "agent_id": rec["agent_id"],
                    "session": int(rec["session"]),
                    "path_edge_count": int(rec["path_edge_count"]),
                    "observed_cost_wh": float(rec["observed_cost_wh"]),
                    "true_expected_cost_wh": float(rec["true_expected_cost_wh"]),
                    "instant_regret_wh": float(rec["instant_regret_wh"]),
                    "cumulative_regret_wh": float(rec["cumulative_regret_wh"]),
                }
            )
    return out


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    agent: str
    fleet_size: int
    horizon: int
    seeds: int
    final_cumulative_regret_mean: float
    final_cumulative_regret_std: float

    def as_tuple(self):
        return (
            self.scenario,
            self.agent,
            self.fleet_size,
            self.horizon,
            self.seeds,
            self.final_cumulative_regret_mean,
            self.final_cumulative_regret_std,
        )


def summarize(scenario: str, agent: str, fleet_size: int, horizon: int, finals) -> SummaryRow:
    """Aggregate per-seed final regrets (each already a fleet mean)."""
    finals = np.asarray(list(finals), dtype=np.float64)
    std = float(finals.std(ddof=1)) if finals.shape[0] > 1 else 0.0
    return SummaryRow(
        scenario, agent, fleet_size, horizon, int(finals.shape[0]), float(finals.mean()), std
    )


def write_summary_csv(path, rows: list[SummaryRow]) -> None:
    atomic_write_text(path, render_csv(SUMMARY_COLUMNS, [r.as_tuple() for r in rows]))


def read_summary_csv(path) -> list[SummaryRow]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SUMMARY_COLUMNS:
            raise ValueError(
                f"{path}: expected columns {SUMMARY_COLUMNS}, got {reader.fieldnames}"
            )
        for rec in reader:
            out.append(
                SummaryRow(
                    rec["scenario"],
                    rec["agent"],
                    int(rec["fleet_size"]),
                    int(rec["horizon"]),
                    int(rec["seeds"]),
                    float(rec["final_cumulative_regret_mean"]),
                    float(rec["final_cumulative_regret_std"]),
                )
            )
    return out


def fleet_final_regret(per_agent_records) -> float:
    """Final cumulative regret averaged over the fleet."""
    finals = []
    for records in per_agent_records:
        total = 0.0
        for rec in records:
            total += rec.instant_regret_wh
        finals.append(total)
    return float(np.mean(finals))


def write_meta_json(path, meta: dict) -> None:
    atomic_write_text(path, json.dumps(meta, indent=2, sort_keys=True) + "\n")
