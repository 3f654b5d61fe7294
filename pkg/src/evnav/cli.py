"""Command-line experiment runner.

Subcommands: ``synth`` (emit a synthetic instance to files), ``run`` (one
scenario, all agents and seeds), ``sweep`` (a grid over one axis), and
``report`` (aggregate summaries into a comparison table). Runs are pure
functions of (config, seed): traces are assembled in a deterministic
order no matter how many worker processes execute them, and all files are
written atomically. EVNAV_OUT_DIR sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import _accel
from .agents import AgentSpec
from .config import SweepSpec, load_scenario, load_sweep
from .errors import EvnavError
from .sim import ScenarioConfig, build_scenario, run_multi_agent
from .synth import SyntheticSpec, generate_instance
from .traces import (
    SummaryRow,
    atomic_write_text,
    fleet_final_regret,
    read_summary_csv,
    render_csv,
    summarize,
    trace_rows,
    write_meta_json,
    write_summary_csv,
    write_trace_csv,
)

OUT_DIR_ENV = "EVNAV_OUT_DIR"

SWEEP_POINT_COLUMNS = ["axis_value", "seed", "final_cumulative_regret"]
SWEEP_SUMMARY_COLUMNS = [
    "axis",
    "axis_value",
    "agent",
    "seeds",
    "final_cumulative_regret_mean",
    "final_cumulative_regret_std",
]


def _out_dir(args) -> str:
    path = args.out_dir or os.environ.get(OUT_DIR_ENV) or "evnav-out"
    os.makedirs(path, exist_ok=True)
    return path


def _run_one(cfg: ScenarioConfig, label: str, seed_index: int):
    """Execute one (agent, seed) run; safe to call in a worker process."""
    scenario = build_scenario(cfg, seed_index)
    records = run_multi_agent(scenario, AgentSpec.from_label(label))
    meta = {
        "agent": label,
        "seed_index": seed_index,
        "n_vertices": scenario.net.n_vertices,
        "n_edges": scenario.net.n_edges,
        "optimal_cost_wh": scenario.gt.optimal(scenario.net, scenario.source, scenario.target)[0],
    }
    if scenario.gt.mc_se_wh is not None:
        meta["true_mean_mc_se_max_wh"] = float(np.max(scenario.gt.mc_se_wh))
    return records, meta


def _run_task(payload):
    cfg, label, seed_index = payload
    return _run_one(cfg, label, seed_index)


def _map_tasks(payloads, jobs: int):
    """Run payloads, possibly in parallel; results keep payload order."""
    if jobs <= 1 or len(payloads) <= 1:
        return [_run_task(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, payloads))


def run_id_for(cfg: ScenarioConfig, label: str, seed_index: int) -> str:
    return f"{cfg.name}--{label}--seed{seed_index}"


def execute_scenario(cfg: ScenarioConfig, jobs: int = 1):
    """All (agent, seed) runs of a scenario.

    Returns (trace rows, summary rows, meta dict) assembled in config
    order, independent of worker scheduling.
    """
    payloads = [
        (cfg, label, seed_index)
        for label in cfg.agents
        for seed_index in range(cfg.num_seeds)
    ]
    results = _map_tasks(payloads, jobs)
    rows = []
    summary = []
    metas = []
    idx = 0
    for label in cfg.agents:
        finals = []
        for seed_index in range(cfg.num_seeds):
            records, meta = results[idx]
            idx += 1
            rows.extend(trace_rows(run_id_for(cfg, label, seed_index), records))
            finals.append(fleet_final_regret(records))
            metas.append(meta)
        summary.append(summarize(cfg.name, label, cfg.fleet_size, cfg.horizon, finals))
    meta = {
        "name": cfg.name,
        "backend": _accel.backend(),
        "mode": cfg.mode,
        "horizon": cfg.horizon,
        "fleet_size": cfg.fleet_size,
        "seed": cfg.seed,
        "num_seeds": cfg.num_seeds,
        "runs": metas,
    }
    return rows, summary, meta


def cmd_run(args) -> int:
    cfg = load_scenario(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = _out_dir(args)
    rows, summary, meta = execute_scenario(cfg, jobs=args.jobs)
    write_trace_csv(os.path.join(out, f"{cfg.name}_trace.csv"), rows)
    write_summary_csv(os.path.join(out, f"{cfg.name}_summary.csv"), summary)
    write_meta_json(os.path.join(out, f"{cfg.name}_meta.json"), meta)
    for row in summary:
        print(
            f"{row.agent}: final cumulative regret mean={row.final_cumulative_regret_mean:.6g} "
            f"std={row.final_cumulative_regret_std:.6g} over {row.seeds} seed(s)"
        )
    return 0


def _sweep_unit_dir(out: str, spec: SweepSpec, value, seed_index: int) -> str:
    return os.path.join(out, "points", f"{spec.axis}-{value}", f"seed{seed_index}")


def _sweep_unit(payload):
    """One (axis value, seed) sweep unit; writes its own files (resumable)."""
    spec, value, seed_index, unit_dir = payload
    cfg = spec.point_config(value)
    label = cfg.agents[0]
    os.makedirs(unit_dir, exist_ok=True)
    try:
        records, meta = _run_one(cfg, label, seed_index)
    except Exception as exc:  # recorded per point; the sweep continues
        return {"value": value, "seed_index": seed_index, "error": f"{type(exc).__name__}: {exc}"}
    final = fleet_final_regret(records)
    write_trace_csv(
        os.path.join(unit_dir, "trace.csv"),
        trace_rows(run_id_for(cfg, label, seed_index), records),
    )
    point = {
        "axis": spec.axis,
        "value": value,
        "seed_index": seed_index,
        "agent": label,
        "final_cumulative_regret": final,
        "run_meta": meta,
    }
    write_meta_json(os.path.join(unit_dir, "point.json"), point)
    return {"value": value, "seed_index": seed_index, "final": final, "agent": label}


def cmd_sweep(args) -> int:
    spec = load_sweep(args.config)
    if args.seed is not None:
        spec = replace(spec, base=replace(spec.base, seed=args.seed))
    out = _out_dir(args)
    units = [
        (value, seed_index)
        for value in spec.values
        for seed_index in range(spec.seeds_per_point)
    ]
    done: dict[tuple, dict] = {}
    pending = []
    for value, seed_index in units:
        unit_dir = _sweep_unit_dir(out, spec, value, seed_index)
        marker = os.path.join(unit_dir, "point.json")
        if args.resume and os.path.exists(marker):
            with open(marker) as fh:
                point = json.load(fh)
            done[(value, seed_index)] = {
                "value": value,
                "seed_index": seed_index,
                "final": point["final_cumulative_regret"],
                "agent": point["agent"],
            }
        else:
            pending.append((spec, value, seed_index, unit_dir))
    if pending:
        if args.jobs <= 1 or len(pending) <= 1:
            results = [_sweep_unit(p) for p in pending]
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_sweep_unit, pending))
        for res in results:
            done[(res["value"], res["seed_index"])] = res
    point_rows = []
    summary_rows = []
    failures = []
    for value in spec.values:
        finals = []
        for seed_index in range(spec.seeds_per_point):
            res = done[(value, seed_index)]
            if "error" in res:
                failures.append((value, seed_index, res["error"]))
                continue
            finals.append(res["final"])
            point_rows.append((value, seed_index, res["final"]))
        if finals:
            arr = np.asarray(finals)
            std = float(arr.std(ddof=1)) if arr.shape[0] > 1 else 0.0
            summary_rows.append(
                (spec.axis, value, spec.base.agents[0], len(finals), float(arr.mean()), std)
            )
    atomic_write_text(
        os.path.join(out, "sweep_points.csv"), render_csv(SWEEP_POINT_COLUMNS, point_rows)
    )
    atomic_write_text(
        os.path.join(out, "sweep_summary.csv"), render_csv(SWEEP_SUMMARY_COLUMNS, summary_rows)
    )
    if failures:
        atomic_write_text(
            os.path.join(out, "sweep_failures.csv"),
            render_csv(["axis_value", "seed", "error"], failures),
        )
        for value, seed_index, err in failures:
            print(f"sweep point {spec.axis}={value} seed{seed_index} failed: {err}", file=sys.stderr)
        return 1
    for row in summary_rows:
        print(
            f"{spec.axis}={row[1]}: final cumulative regret mean={row[4]:.6g} "
            f"std={row[5]:.6g} over {row[3]} seed(s)"
        )
    return 0


def cmd_synth(args) -> int:
    spec = SyntheticSpec(n_vertices=args.n, n_edges=args.q, seed=args.seed)
    inst = generate_instance(spec)
    out = _out_dir(args)
    name = args.name or f"synth-n{args.n}-q{args.q}-seed{args.seed}"
    network_path = os.path.join(out, f"{name}_network.json")
    prior_path = os.path.join(out, f"{name}_priors.csv")
    inst.to_files(network_path, prior_path)
    print(f"network: {network_path}")
    print(f"priors: {prior_path}")
    print(f"optimal expected cost: {inst.optimal_cost_wh} Wh")
    return 0


def cmd_report(args) -> int:
    rows: list[SummaryRow] = []
    for path in args.summaries:
        rows.extend(read_summary_csv(path))
    if not rows:
        raise EvnavError("no summary rows found")
    rows.sort(key=lambda r: (r.final_cumulative_regret_mean, r.agent, r.scenario))
    header = ["agent", "scenario", "fleet", "horizon", "seeds", "mean_final_regret_wh", "std_wh"]
    table = [
        [
            r.agent,
            r.scenario,
            str(r.fleet_size),
            str(r.horizon),
            str(r.seeds),
            f"{r.final_cumulative_regret_mean:.3f}",
            f"{r.final_cumulative_regret_std:.3f}",
        ]
        for r in rows
    ]
    widths = [max(len(h), *(len(row[i]) for row in table)) for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    out_path = args.out or os.path.join(_out_dir(args), "report.csv")
    write_summary_csv(out_path, rows)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evnav",
        description="Bayesian online learning of energy-efficient routes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="emit a synthetic instance to files")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--q", type=int, required=True, help="number of edges")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run one scenario over its agents and seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a one-axis grid of scenarios")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--resume", action="store_true", help="skip completed points")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="aggregate summary CSVs into a table")
    p.add_argument("summaries", nargs="+")
    p.add_argument("--out", default=None, help="path for the CSV twin of the table")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EvnavError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
