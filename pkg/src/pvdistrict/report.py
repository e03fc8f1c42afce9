"""Report emission: delimited tables, human-readable summaries, and figures.

CSV files are the machine contract (full precision, byte-stable for a given
run); the text tables round percentages to integers for readability; each report also renders a matplotlib figure next to
its CSV so results can be eyeballed without further tooling.
"""

from __future__ import annotations

import dataclasses
import json
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dispatch import DispatchResult
from .finance import TECH_PV_EV
from .optimizer import ModeComparison, SweepResult
from .scenario import MODE_AGGREGATED


class ReportError(ValueError):
    pass


TRAJECTORY_ITEMS = [
    ("PV capacity (kW)", lambda r: r.p_kw, "{:.2f}"),
    ("Battery capacity (kWh)", lambda r: r.b_kwh, "{:.2f}"),
    ("NPV ($)", lambda r: r.summary.npv_total, "{:,.0f}"),
    ("Self-consumption (%)", lambda r: r.metrics.sc_pct, "{:.0f}"),
    ("Self-sufficiency (%)", lambda r: r.metrics.ss_pct, "{:.0f}"),
    ("Energy sufficiency (%)", lambda r: r.metrics.es_pct, "{:.0f}"),
    ("CO2 emission reduction (%)", lambda r: r.metrics.co2_reduction_pct, "{:.0f}"),
    ("Cost saving (%)", lambda r: r.metrics.cs_pct, "{:.0f}"),
    ("Simple payback period (year)", lambda r: r.summary.spb_years, "{:.0f}"),
    ("IRR (%)", lambda r: None if r.summary.irr is None else 100 * r.summary.irr, "{:.0f}"),
]

_TECH_LABELS = {TECH_PV_EV: "PV + EV", "pv_plus_battery": "PV (+battery)"}


def _conditions(result: SweepResult) -> tuple[str, str, str]:
    fit = "w FIT" if result.fit else "w/o FIT"
    mode = "Agg." if result.mode == MODE_AGGREGATED else "Indiv."
    return _TECH_LABELS.get(result.technology, result.technology), fit, mode


def _scaled(result: SweepResult, per_house: bool) -> SweepResult:
    if not per_house or result.mode != MODE_AGGREGATED:
        return result
    n = result.n_houses
    summary = dataclasses.replace(
        result.summary,
        npv_total=result.summary.npv_total / n,
        npv_electricity=result.summary.npv_electricity / n,
        npv_gasoline=result.summary.npv_gasoline / n,
        capex=result.summary.capex / n,
        cashflows=tuple(f / n for f in result.summary.cashflows),
    )
    return dataclasses.replace(
        result, p_kw=result.p_kw / n, b_kwh=result.b_kwh / n, summary=summary
    )


def _fmt_full(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.6f}"


def write_trajectory_csv(path, results: list[SweepResult], per_house: bool = False) -> None:
    """Comparison-table CSV: item,condition1..3,y<year> columns, full precision."""
    if not results:
        raise ReportError("nothing to report")
    results = [_scaled(r, per_house) for r in results]
    years = [r.year for r in results]
    header = "item,condition1,condition2,condition3," + ",".join(f"y{y}" for y in years)
    lines = [header]
    cond = _conditions(results[0])
    for item, getter, _ in TRAJECTORY_ITEMS:
        cells = [_fmt_full(getter(r)) for r in results]
        lines.append(",".join(['"' + item + '"', *cond, *cells]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trajectory_text(path, results: list[SweepResult], per_house: bool = False) -> None:
    """Human table with integer-rounded percentages."""
    if not results:
        raise ReportError("nothing to report")
    results = [_scaled(r, per_house) for r in results]
    cond = _conditions(results[0])
    years = [r.year for r in results]
    width = 30
    lines = [
        f"{' / '.join(cond)}"
        + ("  (aggregated figures per house)" if per_house and results[0].mode == MODE_AGGREGATED else ""),
        f"{'Item':<{width}}" + "".join(f"{y:>12}" for y in years),
    ]
    for item, getter, fmt in TRAJECTORY_ITEMS:
        cells = []
        for r in results:
            value = getter(r)
            if value is None or (isinstance(value, float) and math.isnan(value)):
                cells.append(f"{'-':>12}")
            else:
                cells.append(f"{fmt.format(value):>12}")
        lines.append(f"{item:<{width}}" + "".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def render_trajectory_figure(path, results: list[SweepResult], per_house: bool = False) -> None:
    if not results:
        raise ReportError("nothing to report")
    results = [_scaled(r, per_house) for r in results]
    years = [r.year for r in results]
    cond = " / ".join(_conditions(results[0]))
    fig, axes = plt.subplots(2, 3, figsize=(14, 7), sharex=True)

    ax = axes[0, 0]
    ax.plot(years, [r.p_kw for r in results], "o-", color="tab:orange", label="PV (kW)")
    ax.plot(years, [r.b_kwh for r in results], "s-", color="tab:green", label="Battery (kWh)")
    ax.set_title("Optimal capacities")
    ax.legend()

    ax = axes[0, 1]
    ax.plot(years, [r.summary.npv_total for r in results], "o-", color="tab:blue")
    ax.set_title("NPV ($)")

    ax = axes[0, 2]
    ax.plot(years, [r.summary.capex for r in results], "o-", color="tab:red")
    ax.set_title("System cost ($)")

    ax = axes[1, 0]
    for label, getter, color in [
        ("SC", lambda r: r.metrics.sc_pct, "tab:purple"),
        ("SS", lambda r: r.metrics.ss_pct, "tab:cyan"),
        ("ES", lambda r: r.metrics.es_pct, "tab:olive"),
    ]:
        ax.plot(years, [getter(r) for r in results], "o-", color=color, label=label)
    ax.set_title("Energy indices (%)")
    ax.legend()

    ax = axes[1, 1]
    ax.plot(years, [r.metrics.cs_pct for r in results], "o-", label="Cost saving")
    ax.plot(years, [r.metrics.co2_reduction_pct for r in results], "s-", label="CO2 reduction")
    ax.set_title("Savings (%)")
    ax.legend()

    ax = axes[1, 2]
    ax.plot(years, [r.summary.spb_years for r in results], "o-", label="SPB (yr)")
    irr = [None if r.summary.irr is None else 100 * r.summary.irr for r in results]
    ax.plot(years, irr, "s-", label="IRR (%)")
    ax.set_title("Payback and IRR")
    ax.legend()

    for ax in axes[1]:
        ax.set_xlabel("Project start year")
    fig.suptitle(cond)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_sweep_csv(path, result: SweepResult) -> None:
    """NPV surface of one sweep: p_kw,b_kwh,npv_total rows plus the optimum."""
    lines = ["p_kw,b_kwh,npv_total"]
    for p, b, npv in result.surface:
        lines.append(f"{_fmt_full(p)},{_fmt_full(b)},{_fmt_full(npv)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def render_sweep_figure(path, result: SweepResult) -> None:
    surface = result.surface
    if not surface:
        raise ReportError("nothing to report")
    ps = sorted({p for p, _, _ in surface})
    bs = sorted({b for _, b, _ in surface if not math.isnan(b)})
    fig, ax = plt.subplots(figsize=(8, 5))
    if len(bs) > 1:
        grid = np.full((len(bs), len(ps)), np.nan)
        p_index = {p: i for i, p in enumerate(ps)}
        b_index = {b: i for i, b in enumerate(bs)}
        for p, b, npv in surface:
            grid[b_index[b], p_index[p]] = npv
        im = ax.pcolormesh(ps, bs, grid, shading="nearest", cmap="viridis")
        fig.colorbar(im, ax=ax, label="NPV ($)")
        ax.plot([result.p_kw], [result.b_kwh], "r*", markersize=15, label="optimum")
        ax.set_ylabel("Battery capacity (kWh)")
        ax.legend()
    else:
        npvs = [npv for _, _, npv in surface]
        ax.plot(ps, npvs, "o-")
        ax.axvline(result.p_kw, color="red", linestyle="--", label="optimum")
        ax.set_ylabel("NPV ($)")
        ax.legend()
    ax.set_xlabel("PV capacity (kW)")
    ax.set_title(f"{' / '.join(_conditions(result))}, start {result.year}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_fleet_experiment_csv(path, rows: list[dict]) -> None:
    if not rows:
        raise ReportError("nothing to report")
    lines = ["n_ev,mean_daytime_avail,mean_daily_min_avail"]
    for row in rows:
        lines.append(
            f"{row['n_ev']},{_fmt_full(row['mean_daytime_avail'])},"
            f"{_fmt_full(row['mean_daily_min_avail'])}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def render_fleet_experiment_figure(path, rows: list[dict]) -> None:
    if not rows:
        raise ReportError("nothing to report")
    n = [row["n_ev"] for row in rows]
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(n, [100 * row["mean_daytime_avail"] for row in rows], "o-",
            color="tab:red", label="Mean daytime availability")
    ax.plot(n, [100 * row["mean_daily_min_avail"] for row in rows], "s-",
            color="tab:blue", label="Mean of daily minimum")
    ax.set_xlabel("EVs in the system")
    ax.set_ylabel("Available battery capacity (%)")
    ax.set_ylim(0, 105)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


TRACE_COLUMNS = ["load", "pv", "pv_to_load", "pv_to_batt", "batt_to_load",
                 "import", "export", "soc"]


def write_trace_csv(path, result: DispatchResult) -> None:
    """Hourly dispatch trace: hour,load,pv,...,soc."""
    traces = result.traces
    if not traces:
        raise ReportError("dispatch result carries no hourly traces")
    n = len(traces["load"])
    lines = ["hour," + ",".join(TRACE_COLUMNS)]
    for h in range(n):
        cells = ",".join(_fmt_full(float(traces[c][h])) for c in TRACE_COLUMNS)
        lines.append(f"{h},{cells}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def render_trace_figure(path, result: DispatchResult, hours: int = 168) -> None:
    traces = result.traces
    if not traces:
        raise ReportError("dispatch result carries no hourly traces")
    n = min(hours, len(traces["load"]))
    t = np.arange(n)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(12, 7), sharex=True)
    ax1.plot(t, traces["load"][:n], label="load", color="tab:blue")
    ax1.plot(t, traces["pv"][:n], label="pv", color="tab:orange")
    ax1.plot(t, traces["import"][:n], label="import", color="tab:red", alpha=0.7)
    ax1.plot(t, -traces["export"][:n], label="export", color="tab:purple", alpha=0.7)
    ax1.set_ylabel("kWh/h")
    ax1.legend(ncol=4)
    ax2.plot(t, traces["soc"][:n], color="tab:green")
    ax2.set_ylabel("State of charge (kWh)")
    ax2.set_xlabel("Hour")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_result_to_dict(result: SweepResult) -> dict:
    return {
        "year": result.year,
        "mode": result.mode,
        "technology": result.technology,
        "fit": result.fit,
        "n_houses": result.n_houses,
        "p_kw": result.p_kw,
        "b_kwh": result.b_kwh,
        "npv_total": result.summary.npv_total,
        "npv_electricity": result.summary.npv_electricity,
        "npv_gasoline": result.summary.npv_gasoline,
        "irr": result.summary.irr,
        "spb_years": result.summary.spb_years,
        "capex": result.summary.capex,
        "cashflows": list(result.summary.cashflows),
        "es_pct": result.metrics.es_pct,
        "ss_pct": result.metrics.ss_pct,
        "sc_pct": result.metrics.sc_pct,
        "cs_pct": result.metrics.cs_pct,
        "co2_reduction_pct": result.metrics.co2_reduction_pct,
        "emi_base_kg": result.metrics.emi_base_kg,
        "emi_system_kg": result.metrics.emi_system_kg,
        "replacement_years": list(result.replacement_years),
        "surface": [list(row) for row in result.surface],
    }


def sweep_result_from_dict(raw: dict) -> SweepResult:
    from .finance import FinancialSummary
    from .metrics import MetricsRow

    summary = FinancialSummary(
        npv_total=raw["npv_total"], npv_electricity=raw["npv_electricity"],
        npv_gasoline=raw["npv_gasoline"], irr=raw["irr"],
        spb_years=raw["spb_years"], capex=raw["capex"],
        cashflows=tuple(raw["cashflows"]),
    )
    metrics = MetricsRow(
        es_pct=raw["es_pct"], ss_pct=raw["ss_pct"], sc_pct=raw["sc_pct"],
        cs_pct=raw["cs_pct"], co2_reduction_pct=raw["co2_reduction_pct"],
        emi_base_kg=raw["emi_base_kg"], emi_system_kg=raw["emi_system_kg"],
    )
    return SweepResult(
        year=raw["year"], mode=raw["mode"], technology=raw["technology"],
        fit=raw["fit"], n_houses=raw["n_houses"], p_kw=raw["p_kw"],
        b_kwh=raw["b_kwh"], summary=summary, metrics=metrics,
        surface=[tuple(row) for row in raw["surface"]],
        replacement_years=list(raw["replacement_years"]),
    )


def save_results_json(path, kind: str, results: list[SweepResult], scenario_dict: dict) -> None:
    payload = {
        "kind": kind,
        "scenario": scenario_dict,
        "results": [sweep_result_to_dict(r) for r in results],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_results_json(path) -> tuple[str, list[SweepResult], dict]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    results = [sweep_result_from_dict(raw) for raw in payload["results"]]
    if not results:
        raise ReportError("nothing to report")
    return payload["kind"], results, payload["scenario"]


def write_comparison_csv(path, comparison: ModeComparison) -> None:
    """Individual vs aggregated (per household) with their deltas."""
    from .optimizer import per_house_view

    indiv = per_house_view(comparison.individual)
    agg = per_house_view(comparison.aggregated)
    lines = ["item,individual,aggregated_per_house,delta"]
    for key in indiv:
        lines.append(
            f"{key},{_fmt_full(indiv[key])},{_fmt_full(agg[key])},"
            f"{_fmt_full(comparison.deltas[key])}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
