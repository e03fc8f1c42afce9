"""Command-line interface and run manifests.

Every run resolves its output directory (--output beats $PVDISTRICT_OUTDIR
beats ./pvdistrict-out), writes a manifest with the resolved seed, version,
and fully-resolved scenario before any result file, and then emits
deterministic CSVs plus rendered figures.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .fixtures import synth_cf, synth_demand, write_cf_csv, write_demand_csv
from .fleet import min_availability_experiment
from .optimizer import evaluate_configuration, prepare_inputs, sweep, trajectory
from .report import (
    load_results_json,
    render_fleet_experiment_figure,
    render_sweep_figure,
    render_trace_figure,
    render_trajectory_figure,
    save_results_json,
    write_fleet_experiment_csv,
    write_sweep_csv,
    write_trace_csv,
    write_trajectory_csv,
    write_trajectory_text,
)
from .scenario import (
    MODE_AGGREGATED,
    ScenarioConfig,
    ScenarioConfigError,
    parse_scenario,
    scenario_to_dict,
)

OUTPUT_DIR_ENV = "PVDISTRICT_OUTDIR"
DEFAULT_OUTPUT_DIR = "pvdistrict-out"


def _resolve_output_dir(cli_value: str | None) -> Path:
    if cli_value:
        path = Path(cli_value)
    elif os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV])
    else:
        path = Path(DEFAULT_OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(outdir: Path, command: str, args: dict,
                    scenario: ScenarioConfig | None, scenario_path: str | None) -> None:
    manifest = {
        "tool": "pvdistrict",
        "version": __version__,
        "command": command,
        "arguments": args,
        "scenario_file": scenario_path,
        "seed": scenario.seed if scenario is not None else args.get("seed"),
        "output_dir": str(outdir),
        "started_at": dt.datetime.now(dt.timezone.utc).isoformat(),
    }
    if scenario is not None:
        manifest["resolved_scenario"] = scenario_to_dict(scenario)
        manifest["applied_defaults"] = scenario.applied_defaults
    with open(outdir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _load_scenario(args) -> ScenarioConfig:
    scenario = parse_scenario(args.config)
    if args.seed is not None:
        scenario = replace(
            scenario,
            seed=args.seed,
            fleet=replace(scenario.fleet, seed=args.seed),
            applied_defaults=scenario.applied_defaults,
        )
    return scenario


def _parse_range(spec: str, what: str) -> list[int]:
    """'2020:2040:5' -> [2020,2025,...]; '1:100' -> 1..100; '3,7' -> [3, 7]."""
    try:
        if ":" in spec:
            parts = [int(p) for p in spec.split(":")]
            if len(parts) == 2:
                start, stop = parts
                step = 1
            elif len(parts) == 3:
                start, stop, step = parts
            else:
                raise ValueError
            if step <= 0 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(p) for p in spec.split(",")]
    except ValueError:
        raise SystemExit(f"invalid {what} range {spec!r}; use start:stop[:step] or a,b,c")


def _cmd_simulate(args) -> int:
    scenario = _load_scenario(args)
    outdir = _resolve_output_dir(args.output)
    _write_manifest(outdir, "simulate", vars(args), scenario, args.config)
    data = prepare_inputs(scenario)
    year = args.year if args.year is not None else scenario.finance.project_start_year

    if scenario.mode == MODE_AGGREGATED:
        demand = data.district_demand
        n_vehicles = scenario.fleet.n_ev
        house_index = None
        default_p = scenario.district.max_pv_kw_per_house * scenario.district.n_houses
    else:
        demand = data.house_profiles[0]
        n_vehicles = 1
        house_index = 0
        default_p = scenario.district.max_pv_kw_per_house
    p_kw = args.pv_kw if args.pv_kw is not None else default_p
    b_kwh = args.battery_kwh if args.battery_kwh is not None else 0.0

    evaluation = evaluate_configuration(
        demand, data.cf, scenario, year, p_kw,
        b_stationary_kwh=b_kwh, n_vehicles=n_vehicles, house_index=house_index,
        keep_first_year=True,
    )
    summary = {
        "scenario": scenario.name,
        "year": year,
        "p_kw": evaluation.p_kw,
        "b_kwh": evaluation.b_kwh,
        "npv_total": evaluation.summary.npv_total,
        "npv_electricity": evaluation.summary.npv_electricity,
        "npv_gasoline": evaluation.summary.npv_gasoline,
        "irr": evaluation.summary.irr,
        "spb_years": evaluation.summary.spb_years,
        "capex": evaluation.summary.capex,
        "replacement_years": evaluation.replacement_years,
        "es_pct": evaluation.metrics.es_pct,
        "ss_pct": evaluation.metrics.ss_pct,
        "sc_pct": evaluation.metrics.sc_pct,
        "cs_pct": evaluation.metrics.cs_pct,
        "co2_reduction_pct": evaluation.metrics.co2_reduction_pct,
        "first_year": {
            "e_import": evaluation.first_year.e_import,
            "e_export": evaluation.first_year.e_export,
            "e_pv": evaluation.first_year.e_pv,
            "e_pv_to_load": evaluation.first_year.e_pv_to_load,
            "e_batt_to_load": evaluation.first_year.e_batt_to_load,
            "e_driving": evaluation.first_year.e_driving,
            "e_losses": evaluation.first_year.e_losses,
        },
    }
    with open(outdir / "simulation.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.trace:
        write_trace_csv(outdir / "trace.csv", evaluation.first_year)
        render_trace_figure(outdir / "trace.png", evaluation.first_year)
    print(f"simulate: NPV ${evaluation.summary.npv_total:,.0f} "
          f"(p={evaluation.p_kw:.1f} kW, b={evaluation.b_kwh:.1f} kWh) -> {outdir}")
    return 0


def _cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    outdir = _resolve_output_dir(args.output)
    _write_manifest(outdir, "sweep", vars(args), scenario, args.config)
    result = sweep(scenario, args.year)
    stem = f"{scenario.name}_sweep_{args.year}"
    save_results_json(outdir / f"{stem}.json", "sweep", [result], scenario_to_dict(scenario))
    write_sweep_csv(outdir / f"{stem}.csv", result)
    render_sweep_figure(outdir / f"{stem}.png", result)
    print(f"sweep {args.year}: best p={result.p_kw:.1f} kW b={result.b_kwh:.1f} kWh "
          f"NPV ${result.summary.npv_total:,.0f} -> {outdir}")
    return 0


def _cmd_trajectory(args) -> int:
    scenario = _load_scenario(args)
    outdir = _resolve_output_dir(args.output)
    _write_manifest(outdir, "trajectory", vars(args), scenario, args.config)
    years = _parse_range(args.years, "years")
    results = trajectory(scenario, years)
    stem = f"{scenario.name}_trajectory"
    save_results_json(outdir / f"{stem}.json", "trajectory", results, scenario_to_dict(scenario))
    write_trajectory_csv(outdir / f"{stem}.csv", results, per_house=args.per_house)
    write_trajectory_text(outdir / f"{stem}.txt", results, per_house=args.per_house)
    render_trajectory_figure(outdir / f"{stem}.png", results, per_house=args.per_house)
    print(f"trajectory {years[0]}-{years[-1]}: {len(results)} rows -> {outdir}")
    return 0


def _cmd_fleet_experiment(args) -> int:
    outdir = _resolve_output_dir(args.output)
    _write_manifest(outdir, "fleet-experiment", vars(args), None, None)
    sizes = _parse_range(args.evs, "EV")
    rows = min_availability_experiment(sizes, n_days=args.days, seed=args.seed or 0)
    write_fleet_experiment_csv(outdir / "fleet_experiment.csv", rows)
    render_fleet_experiment_figure(outdir / "fleet_experiment.png", rows)
    print(f"fleet-experiment: {len(rows)} fleet sizes over {args.days} days -> {outdir}")
    return 0


def _cmd_synth_fixtures(args) -> int:
    outdir = _resolve_output_dir(args.output)
    _write_manifest(outdir, "synth-fixtures", vars(args), None, None)
    seed = args.seed or 0
    profiles = synth_demand(args.kind, args.houses, seed)
    named = {f"H{i:03d}": profile for i, profile in enumerate(profiles)}
    write_demand_csv(outdir / "demand.csv", named)
    write_cf_csv(outdir / "cf.csv", synth_cf(seed, args.target_cf))
    print(f"synth-fixtures: {args.houses} {args.kind} profiles -> {outdir}")
    return 0


def _cmd_report(args) -> int:
    outdir = _resolve_output_dir(args.output)
    _write_manifest(outdir, "report", vars(args), None, None)
    kind, results, scenario_dict = load_results_json(args.results)
    name = scenario_dict.get("name", "results")
    if kind == "trajectory":
        write_trajectory_csv(outdir / f"{name}_trajectory.csv", results, per_house=args.per_house)
        write_trajectory_text(outdir / f"{name}_trajectory.txt", results, per_house=args.per_house)
        render_trajectory_figure(outdir / f"{name}_trajectory.png", results, per_house=args.per_house)
    elif kind == "sweep":
        result = results[0]
        write_sweep_csv(outdir / f"{name}_sweep_{result.year}.csv", result)
        render_sweep_figure(outdir / f"{name}_sweep_{result.year}.png", result)
    else:
        raise SystemExit(f"unknown results kind {kind!r}")
    print(f"report: rendered {kind} from {args.results} -> {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvdistrict",
        description="District-scale techno-economic simulation of rooftop PV "
                    "with battery or bidirectional-EV storage.",
    )
    parser.add_argument("--version", action="version", version=f"pvdistrict {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scenario_file=True):
        if scenario_file:
            p.add_argument("config", help="scenario YAML file")
            p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        else:
            p.add_argument("--seed", type=int, default=None)
        p.add_argument("-o", "--output", default=None,
                       help=f"output directory (default ${OUTPUT_DIR_ENV} or ./{DEFAULT_OUTPUT_DIR})")

    p = sub.add_parser("simulate", help="simulate one configuration")
    add_common(p)
    p.add_argument("--year", type=int, default=None, help="project start year")
    p.add_argument("--pv-kw", type=float, default=None, help="PV capacity (default: rooftop max)")
    p.add_argument("--battery-kwh", type=float, default=None,
                   help="stationary battery capacity (ignored for pv_plus_ev)")
    p.add_argument("--trace", action="store_true", help="write the hourly dispatch trace")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="grid-search capacities for one start year")
    add_common(p)
    p.add_argument("--year", type=int, required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("trajectory", help="sweep a range of project start years")
    add_common(p)
    p.add_argument("--years", required=True, help="start:stop[:step], e.g. 2020:2040:5")
    p.add_argument("--per-house", action="store_true",
                   help="divide aggregated absolute figures by the house count")
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("fleet-experiment", help="fleet-size availability experiment")
    add_common(p, scenario_file=False)
    p.add_argument("--evs", default="1:100", help="fleet sizes, e.g. 1:100 or 1,10,50")
    p.add_argument("--days", type=int, default=1000)
    p.set_defaults(func=_cmd_fleet_experiment)

    p = sub.add_parser("synth-fixtures", help="write synthetic demand and CF CSVs")
    add_common(p, scenario_file=False)
    p.add_argument("--kind", choices=("residential", "commercial"), default="residential")
    p.add_argument("--houses", type=int, default=50)
    p.add_argument("--target-cf", type=float, default=0.135)
    p.set_defaults(func=_cmd_synth_fixtures)

    p = sub.add_parser("report", help="re-render tables and figures from a results JSON")
    add_common(p, scenario_file=False)
    p.add_argument("results", help="results JSON produced by sweep/trajectory")
    p.add_argument("--per-house", action="store_true")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
