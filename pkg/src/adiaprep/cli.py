"""Configuration-driven command line for schedules, gaps, evolutions, sweeps.

Subcommands: schedule | gap | evolve | sweep | fit | preset.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from collections import defaultdict

import numpy as np

from . import presets
from .analysis import fit_exponential, fit_power_law, split_regimes
from .config import (
    apply_overrides,
    build_path,
    build_schedule,
    config_header,
    epsilon_list,
    load_config,
    output_directory,
    validate_config,
)
from .errors import AdiaprepError, ConfigError
from .evolution import (
    EvolutionConfig,
    evolve,
    sweep,
    write_sweep_csv,
    write_trajectory_csv,
)
from .models import IsingSemicirclePath
from .schedules import DIVERGING, measure_boundary_order, write_schedule_csv
from .spectral import gap_profile


def _load(args) -> dict:
    if not args.config:
        raise ConfigError("a config file is required (-c/--config)")
    with open(args.config) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    raw = apply_overrides(raw, args.set)
    return validate_config(raw)


def _outdir(cfg, args) -> str:
    path = output_directory(cfg, args.out)
    os.makedirs(path, exist_ok=True)
    return path


def _write_summary(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_schedule(args) -> int:
    cfg = _load(args)
    outdir = _outdir(cfg, args)
    path = build_path(cfg)
    sched = build_schedule(cfg, path)
    csv_path = os.path.join(outdir, "schedule.csv")
    write_schedule_csv(sched, csv_path, n_points=1001, header_lines=[config_header(cfg)])
    measured = measure_boundary_order(sched)
    summary = {
        "config": cfg,
        "schedule": sched.label,
        "declared_order": sched.order,
        "measured_order": measured,
        "agrees": measured == sched.order,
    }
    _write_summary(os.path.join(outdir, "schedule_summary.json"), summary)
    print(f"schedule {sched.label}: declared order {sched.order}, "
          f"measured {measured} -> {csv_path}")
    return 0


def cmd_gap(args) -> int:
    cfg = _load(args)
    outdir = _outdir(cfg, args)
    path = build_path(cfg)
    profile = gap_profile(path, grid_size=cfg["schedule"]["gap_grid_size"])
    csv_path = os.path.join(outdir, "gap.csv")
    profile.to_csv(csv_path, header_lines=[config_header(cfg)])
    print(f"gap profile ({len(profile.s)} points, min {profile.min_gap:.6g}) -> {csv_path}")
    return 0


def cmd_evolve(args) -> int:
    cfg = _load(args)
    outdir = _outdir(cfg, args)
    path = build_path(cfg)
    sched = build_schedule(cfg, path)
    run = cfg["run"]
    summary = {"config": cfg, "runs": []}
    for eps in epsilon_list(cfg):
        T = 1.0 / eps
        ecfg = EvolutionConfig(path=path, schedule=sched, T=T,
                               tolerance=run["tolerance"], samples=run["samples"],
                               backend=run["backend"])
        result = evolve(ecfg)
        name = f"evolve_T{T:g}.csv"
        write_trajectory_csv(result.record, os.path.join(outdir, name),
                             header_lines=[config_header(cfg)])
        summary["runs"].append({
            "T": T, "epsilon": eps, "trajectory": name,
            "final_delta": result.record.delta[-1],
            "max_norm_drift": float(np.max(np.abs(result.record.norm - 1.0))),
        })
        print(f"T={T:g}: final delta {result.record.delta[-1]:.6e} -> {name}")
    _write_summary(os.path.join(outdir, "evolve_summary.json"), summary)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    outdir = _outdir(cfg, args)
    path = build_path(cfg)
    sched = build_schedule(cfg, path)
    run = cfg["run"]
    rows = sweep(path, epsilon_list(cfg), [sched], tolerance=run["tolerance"],
                 backend=run["backend"], max_workers=args.workers or run["max_workers"])
    csv_path = os.path.join(outdir, "sweep.csv")
    write_sweep_csv(rows, csv_path, header_lines=[config_header(cfg)])
    failures = [r for r in rows if r.error]
    _write_summary(os.path.join(outdir, "sweep_summary.json"), {
        "config": cfg,
        "rows": len(rows),
        "failures": [{"epsilon": r.epsilon, "error": r.error} for r in failures],
    })
    print(f"{len(rows)} runs ({len(failures)} failed) -> {csv_path}")
    return 3 if len(failures) == len(rows) else 0


def _read_sweep_csv(path):
    groups = defaultdict(list)
    with open(path, newline="") as fh:
        data_lines = (line for line in fh if not line.startswith("#"))
        for row in csv.DictReader(data_lines):
            if row.get("error"):
                continue
            try:
                eps = float(row["epsilon"])
                delta = float(row["final_infidelity"])
            except (KeyError, ValueError):
                continue
            key = (row.get("model", ""), row.get("L", ""),
                   row.get("schedule_label") or row.get("schedule_kind", ""))
            groups[key].append((eps, delta))
    return groups


def cmd_fit(args) -> int:
    groups = _read_sweep_csv(args.results)
    if not groups:
        raise ConfigError(f"no usable rows found in {args.results}")
    report = {}
    for (model, L, label), pts in sorted(groups.items()):
        name = f"{model}_L{L}_{label}"
        entry = {"n_points": len(pts)}
        try:
            split = split_regimes(pts)
            entry["split"] = split.to_dict()
        except AdiaprepError as exc:
            entry["split_error"] = str(exc)
            try:
                entry["power_law"] = fit_power_law(pts).to_dict()
                entry["exponential"] = fit_exponential(pts).to_dict()
            except AdiaprepError as exc2:
                entry["fit_error"] = str(exc2)
        report[name] = entry
    out = args.out_file or os.path.splitext(args.results)[0] + "_fit.json"
    _write_summary(out, report)
    print(f"fits for {len(report)} curves -> {out}")
    return 0


def _run_sweep_jobs(jobs, outdir, name, workers):
    rows = []
    for path, scheds, eps, tol in jobs:
        rows += sweep(path, eps, list(scheds), tolerance=tol, max_workers=workers)
    csv_path = os.path.join(outdir, f"{name}.csv")
    write_sweep_csv(rows, csv_path, header_lines=[f"preset: {name}"])
    print(f"{name}: {len(rows)} runs -> {csv_path}")
    return rows


def cmd_preset(args) -> int:
    if args.list:
        for name in presets.PRESET_NAMES:
            print(name)
        return 0
    name = args.name
    if name not in presets.PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; try --list")
    outdir = args.out or os.environ.get("ADIAPREP_OUTDIR") or "adiaprep-out"
    os.makedirs(outdir, exist_ok=True)
    workers = args.workers

    if name == "fig2-desk":
        path = IsingSemicirclePath(presets.FIG2_L)
        for sched in presets.fig2_schedules():
            cfg = EvolutionConfig(path=path, schedule=sched, T=presets.FIG2_T,
                                  samples=presets.FIG2_SAMPLES,
                                  tolerance=presets.FIG2_TOLERANCE)
            record = evolve(cfg).record
            fname = os.path.join(outdir, f"fig2_{sched.label}.csv")
            write_trajectory_csv(record, fname, header_lines=[f"preset: {name}",
                                                              f"T: {presets.FIG2_T}"])
            print(f"{sched.label}: final delta {record.delta[-1]:.4e} -> {fname}")
        return 0
    if name == "fig3-desk":
        _run_sweep_jobs(presets.fig3_jobs(), outdir, "fig3_sweep", workers)
        return 0
    if name == "fig4-desk":
        _run_sweep_jobs(presets.tradeoff_jobs(), outdir, "fig4_sweep", workers)
        return 0
    path = presets.rydberg_preset_path()
    scheds = presets.fig5a_schedules(path)
    _run_sweep_jobs([(path, scheds, presets.FIG5A_EPSILONS, presets.FIG5A_TOLERANCE)],
                    outdir, "fig5a_sweep", workers)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiaprep",
        description="Boundary-smooth annealing schedules for spin chains: "
                    "schedule inspection, gap profiling, evolutions, sweeps, fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("-c", "--config", required=False, help="JSON config file")
            p.add_argument("--set", action="append", metavar="BLOCK.KEY=VALUE",
                           help="override a config field (repeatable)")
        p.add_argument("--out", help="output directory (overrides config and "
                                     "the ADIAPREP_OUTDIR environment variable)")
        p.add_argument("--workers", type=int, help="worker pool size for sweeps")

    p = sub.add_parser("schedule", help="tabulate a schedule and measure its boundary order")
    common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("gap", help="tabulate the spectral gap along the model path")
    common(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("evolve", help="integrate single runs and record trajectories")
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="final infidelity over a list of run times")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit scaling regimes of a sweep CSV")
    p.add_argument("results", help="sweep CSV produced by the sweep/preset commands")
    p.add_argument("-o", "--out-file", help="output JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("preset", help="run a figure-reproduction preset")
    p.add_argument("name", nargs="?", default="", help="preset name (see --list)")
    p.add_argument("--list", action="store_true", help="list available presets")
    common(p, needs_config=False)
    p.set_defaults(func=cmd_preset)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AdiaprepError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
