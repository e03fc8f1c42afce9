"""Capacity sweeps and multi-year scenario trajectories.

An exhaustive grid over PV (and, for stationary batteries, storage)
capacities is simulated over the full project horizon for each candidate;
the configuration with the highest NPV represents the scenario-year.
PV+EV runs fix the battery at the fleet's V2H-usable capacity. Aggregated
mode treats the district's summed demand with a pooled fleet; individual
mode analyses each house with its own vehicle and averages the results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dispatch import (
    KIND_EV_INDIVIDUAL,
    KIND_EV_POOLED,
    KIND_STATIONARY,
    DispatchResult,
    ProjectParams,
    StorageConfig,
    Tariff,
    simulate_project,
    simulate_year,
)
from .finance import (
    TECH_PV_EV,
    FinancialSummary,
    annual_electricity_cost,
    irr as compute_irr,
    npv_electricity,
    npv_gasoline,
    spb as compute_spb,
    system_cost,
)
from .fixtures import synth_cf, synth_demand
from .fleet import availability_profile, driving_draw, sample_trips
from .metrics import MetricsRow, co2, cost_saving, energy_indices
from .profiles import DAYS_PER_YEAR, HourlyProfile, aggregate, fill_gaps, load_cf_csv, load_demand_csv
from .pv import PvConfig, calibrate_cf
from .scenario import MODE_AGGREGATED, MODE_INDIVIDUAL, ScenarioConfig


@dataclass
class InputData:
    """Demand and calibrated capacity-factor profiles resolved for a scenario."""

    house_profiles: list[HourlyProfile]
    district_demand: HourlyProfile
    cf: HourlyProfile


@dataclass
class SweepResult:
    """Best configuration of one scenario-year plus the full NPV surface."""

    year: int
    mode: str
    technology: str
    fit: bool
    n_houses: int
    p_kw: float
    b_kwh: float
    summary: FinancialSummary
    metrics: MetricsRow
    surface: list = field(default_factory=list, repr=False)
    replacement_years: list = field(default_factory=list)
    per_house: list | None = field(default=None, repr=False)


@dataclass
class ModeComparison:
    """Individual-average vs aggregated-per-house results and their deltas."""

    individual: SweepResult
    aggregated: SweepResult
    deltas: dict


def prepare_inputs(scenario: ScenarioConfig) -> InputData:
    """Load or synthesize demand, repair gaps, and calibrate the CF profile."""
    district = scenario.district
    if district.demand_csv is not None:
        raw = load_demand_csv(district.demand_csv)
        houses = [fill_gaps(p) for _, p in sorted(raw.items())]
    else:
        houses = synth_demand(district.synth_kind, district.n_houses, scenario.seed)
    if len(houses) != district.n_houses:
        raise ValueError(
            f"demand source has {len(houses)} houses, config says {district.n_houses}"
        )
    if scenario.pv.cf_csv is not None:
        cf = fill_gaps(load_cf_csv(scenario.pv.cf_csv))
        cf = calibrate_cf(cf, scenario.pv.target_annual_cf)
    else:
        cf = synth_cf(scenario.seed, scenario.pv.target_annual_cf)
    return InputData(
        house_profiles=houses,
        district_demand=aggregate(houses),
        cf=cf,
    )


def _effective_tariff(scenario: ScenarioConfig) -> Tariff:
    # Without FIT the energy may still flow out, it just earns nothing.
    if scenario.fit:
        return scenario.tariff
    return Tariff(scenario.tariff.import_price, 0.0)


def _grid(maximum: float, step: float) -> list[float]:
    if maximum <= 0:
        return [0.0]
    n = int(round(maximum / step))
    return [i * step for i in range(n + 1)]


def _pv_grid(scenario: ScenarioConfig, aggregated: bool) -> list[float]:
    per_house_max = scenario.sweep.pv_max_kw
    if per_house_max is None:
        per_house_max = scenario.district.max_pv_kw_per_house
    per_house_max = min(per_house_max, scenario.district.max_pv_kw_per_house)
    if not aggregated:
        return _grid(per_house_max, scenario.sweep.pv_step_kw)
    district_max = per_house_max * scenario.district.n_houses
    return _grid(district_max, district_max / 20.0)


def _battery_grid(scenario: ScenarioConfig, aggregated: bool) -> list[float]:
    if scenario.technology == TECH_PV_EV:
        # Battery capacity is not swept for EVs: it is the fleet's usable share.
        return [float("nan")]
    per_house_max = scenario.sweep.battery_max_kwh
    if not aggregated:
        return _grid(per_house_max, scenario.sweep.battery_step_kwh)
    district_max = per_house_max * scenario.district.n_houses
    return _grid(district_max, district_max / 20.0 if district_max > 0 else 1.0)


def _build_storage(
    scenario: ScenarioConfig,
    b_stationary_kwh: float,
    n_vehicles: int,
    house_index: int | None,
) -> tuple[StorageConfig, float]:
    """Storage for one analysis unit; returns (config, finance-usable kWh)."""
    params = scenario.storage
    if scenario.technology == TECH_PV_EV:
        fleet = replace(scenario.fleet, n_ev=n_vehicles)
        nominal = fleet.fleet_battery_kwh
        floor = (1.0 - fleet.v2h_fraction) * nominal
        if house_index is None:
            avail = availability_profile(fleet, "pooled").values
            driving = driving_draw(fleet, "pooled").values
            kind = KIND_EV_POOLED
        else:
            schedule = sample_trips(
                fleet.seed, DAYS_PER_YEAR, fleet.trips_per_day,
                vehicle_id=house_index, energy_per_trip_kwh=fleet.energy_per_trip_kwh,
            )
            single = replace(fleet, n_ev=1)
            avail = availability_profile(single, "individual")[0].values
            driving = driving_draw(single, "individual", schedule).values
            kind = KIND_EV_INDIVIDUAL
        storage = StorageConfig(
            kind=kind, nominal_kwh=nominal, soc_floor_kwh=floor,
            charge_efficiency=params.charge_efficiency,
            discharge_efficiency=params.discharge_efficiency,
            power_limit_kw=params.power_limit_kw,
            availability=avail, driving_kwh=driving,
            calendar_degradation=params.calendar_degradation,
            cycle_degradation=params.cycle_degradation,
            replacement_threshold=params.replacement_threshold,
        )
        return storage, fleet.v2h_usable_kwh
    if b_stationary_kwh <= 0:
        return StorageConfig.none(), 0.0
    storage = StorageConfig(
        kind=KIND_STATIONARY, nominal_kwh=b_stationary_kwh, soc_floor_kwh=0.0,
        charge_efficiency=params.charge_efficiency,
        discharge_efficiency=params.discharge_efficiency,
        power_limit_kw=params.power_limit_kw,
        calendar_degradation=params.calendar_degradation,
        cycle_degradation=params.cycle_degradation,
        replacement_threshold=params.replacement_threshold,
    )
    return storage, b_stationary_kwh


@dataclass
class Evaluation:
    p_kw: float
    b_kwh: float
    summary: FinancialSummary
    metrics: MetricsRow
    replacement_years: list
    first_year: DispatchResult | None = None


def evaluate_configuration(
    demand: HourlyProfile,
    cf: HourlyProfile,
    scenario: ScenarioConfig,
    year: int,
    p_kw: float,
    b_stationary_kwh: float = 0.0,
    n_vehicles: int = 0,
    house_index: int | None = None,
    p_max_kw: float | None = None,
    baseline: DispatchResult | None = None,
    keep_first_year: bool = False,
) -> Evaluation:
    """Full project valuation of one (p, b) candidate starting in ``year``."""
    tariff = _effective_tariff(scenario)
    finance = replace(scenario.finance, project_start_year=year)
    params = ProjectParams(n_years=finance.project_years, start_year=year)
    pv_cfg = PvConfig(
        capacity_kw=p_kw,
        annual_degradation=scenario.pv.annual_degradation,
        max_capacity_kw=p_max_kw if p_max_kw else max(p_kw, 1e-9),
    )
    storage, b_finance = _build_storage(scenario, b_stationary_kwh, n_vehicles, house_index)

    results, replacement_years = simulate_project(
        demand, cf, pv_cfg, storage, tariff, params, keep_traces=keep_first_year
    )
    if baseline is None:
        demand_values = demand.values if isinstance(demand, HourlyProfile) else np.asarray(demand, float)
        baseline = simulate_year(demand_values, np.zeros_like(demand_values), StorageConfig.none())
    base_annual_cost = annual_electricity_cost(
        baseline, tariff, 0.0, 0.0, scenario.costs, year, start_year=year
    )
    base_costs = [base_annual_cost] * finance.project_years
    system_costs = [
        annual_electricity_cost(
            result, tariff, p_kw, b_finance, scenario.costs,
            year + n, replacement_this_year=result.replacement_occurred,
            start_year=year,
        )
        for n, result in enumerate(results)
    ]
    capex = system_cost(
        p_kw, b_finance, year, scenario.costs,
        technology=scenario.technology, v2h_fraction=scenario.fleet.v2h_fraction,
    )
    npv_elec = npv_electricity(base_costs, system_costs, capex, finance)

    is_ev = scenario.technology == TECH_PV_EV
    transport = replace(scenario.transport, n_vehicles=n_vehicles) if is_ev else None
    gas_annual = transport.annual_gasoline_cost() if is_ev else 0.0
    npv_gas = npv_gasoline(transport, finance) if is_ev else 0.0

    cashflows = tuple(
        (base - system) + gas_annual for base, system in zip(base_costs, system_costs)
    )
    if capex > 0:
        irr_value = compute_irr(cashflows, capex)
        spb_value = compute_spb(cashflows, capex)
    else:
        irr_value, spb_value = None, 0.0
    summary = FinancialSummary(
        npv_total=npv_elec + npv_gas,
        npv_electricity=npv_elec,
        npv_gasoline=npv_gas,
        irr=irr_value,
        spb_years=spb_value,
        capex=capex,
        cashflows=cashflows,
    )

    first = results[0]
    try:
        es, ss, sc = energy_indices(first)
    except ValueError:
        es = ss = sc = float("nan")
    try:
        cs = cost_saving(summary, base_annual_cost + gas_annual, finance.project_years)
    except ValueError:
        cs = float("nan")
    try:
        emi_base, emi_system, reduction = co2(
            baseline, first, scenario.emissions, transport, include_gasoline=is_ev
        )
    except ValueError:
        emi_base = emi_system = reduction = float("nan")
    metrics = MetricsRow(
        es_pct=es, ss_pct=ss, sc_pct=sc, cs_pct=cs,
        co2_reduction_pct=reduction, emi_base_kg=emi_base, emi_system_kg=emi_system,
    )
    return Evaluation(
        p_kw=p_kw, b_kwh=b_finance, summary=summary, metrics=metrics,
        replacement_years=replacement_years,
        first_year=first if keep_first_year else None,
    )


def _sweep_single_system(
    demand: HourlyProfile,
    cf: HourlyProfile,
    scenario: ScenarioConfig,
    year: int,
    n_vehicles: int,
    house_index: int | None,
    aggregated: bool,
    p_values: list[float] | None = None,
    b_values: list[float] | None = None,
) -> tuple[Evaluation, list]:
    if p_values is None:
        p_values = _pv_grid(scenario, aggregated)
    if b_values is None:
        b_values = _battery_grid(scenario, aggregated)
    p_max = max(p_values)
    baseline = simulate_year(demand, np.zeros_like(demand.values), StorageConfig.none())

    best: Evaluation | None = None
    surface = []
    for p in sorted(p_values):
        for b in sorted(b_values):
            b_stationary = 0.0 if math.isnan(b) else b
            try:
                evaluation = evaluate_configuration(
                    demand, cf, scenario, year, p,
                    b_stationary_kwh=b_stationary, n_vehicles=n_vehicles,
                    house_index=house_index, p_max_kw=p_max, baseline=baseline,
                )
            except Exception as exc:
                raise RuntimeError(f"sweep failed at (p={p} kW, b={b} kWh): {exc}") from exc
            npv = evaluation.summary.npv_total
            surface.append((p, evaluation.b_kwh, npv))
            if best is None:
                best = evaluation
            elif npv - best.summary.npv_total > 1e-9 * max(1.0, abs(best.summary.npv_total)):
                best = evaluation
    if best is None:
        raise ValueError("sweep grid is empty")
    return best, surface


def _mean_or_none(values):
    present = [v for v in values if v is not None]
    if not present:
        return None
    return float(np.mean(present))


def _average_house_results(results: list[SweepResult], year: int,
                           scenario: ScenarioConfig) -> SweepResult:
    summaries = [r.summary for r in results]
    metrics_rows = [r.metrics for r in results]
    n = len(results)
    mean_flows = tuple(np.mean([s.cashflows for s in summaries], axis=0))
    # Per-house sweeps share one grid, so the mean NPV surface is well defined.
    mean_surface = [
        (points[0][0], points[0][1], float(np.mean([npv for _, _, npv in points])))
        for points in zip(*(r.surface for r in results))
    ]
    summary = FinancialSummary(
        npv_total=float(np.mean([s.npv_total for s in summaries])),
        npv_electricity=float(np.mean([s.npv_electricity for s in summaries])),
        npv_gasoline=float(np.mean([s.npv_gasoline for s in summaries])),
        irr=_mean_or_none([s.irr for s in summaries]),
        spb_years=_mean_or_none([s.spb_years for s in summaries]),
        capex=float(np.mean([s.capex for s in summaries])),
        cashflows=mean_flows,
    )
    metrics = MetricsRow(
        es_pct=float(np.mean([m.es_pct for m in metrics_rows])),
        ss_pct=float(np.mean([m.ss_pct for m in metrics_rows])),
        sc_pct=float(np.mean([m.sc_pct for m in metrics_rows])),
        cs_pct=float(np.mean([m.cs_pct for m in metrics_rows])),
        co2_reduction_pct=float(np.mean([m.co2_reduction_pct for m in metrics_rows])),
        emi_base_kg=float(np.mean([m.emi_base_kg for m in metrics_rows])),
        emi_system_kg=float(np.mean([m.emi_system_kg for m in metrics_rows])),
    )
    return SweepResult(
        year=year, mode=MODE_INDIVIDUAL, technology=scenario.technology,
        fit=scenario.fit, n_houses=n,
        p_kw=float(np.mean([r.p_kw for r in results])),
        b_kwh=float(np.mean([r.b_kwh for r in results])),
        summary=summary, metrics=metrics,
        surface=mean_surface, replacement_years=[], per_house=results,
    )


def sweep(scenario: ScenarioConfig, year: int, data: InputData | None = None) -> SweepResult:
    """Grid-search the scenario-year; ties break to smaller PV then battery."""
    if data is None:
        data = prepare_inputs(scenario)
    if scenario.mode == MODE_AGGREGATED:
        n_vehicles = scenario.fleet.n_ev
        best, surface = _sweep_single_system(
            data.district_demand, data.cf, scenario, year,
            n_vehicles=n_vehicles, house_index=None, aggregated=True,
        )
        return SweepResult(
            year=year, mode=MODE_AGGREGATED, technology=scenario.technology,
            fit=scenario.fit, n_houses=scenario.district.n_houses,
            p_kw=best.p_kw, b_kwh=best.b_kwh, summary=best.summary,
            metrics=best.metrics, surface=surface,
            replacement_years=best.replacement_years,
        )
    house_results = []
    for index, demand in enumerate(data.house_profiles):
        best, surface = _sweep_single_system(
            demand, data.cf, scenario, year,
            n_vehicles=1, house_index=index, aggregated=False,
        )
        house_results.append(
            SweepResult(
                year=year, mode=MODE_INDIVIDUAL, technology=scenario.technology,
                fit=scenario.fit, n_houses=1,
                p_kw=best.p_kw, b_kwh=best.b_kwh, summary=best.summary,
                metrics=best.metrics, surface=surface,
                replacement_years=best.replacement_years,
            )
        )
    return _average_house_results(house_results, year, scenario)


def trajectory(scenario: ScenarioConfig, years: list[int],
               data: InputData | None = None) -> list[SweepResult]:
    """Independent sweep per project-start year (the 2020-2040 tables)."""
    if not years:
        raise ValueError("trajectory needs at least one year")
    if data is None:
        data = prepare_inputs(scenario)
    return [sweep(scenario, year, data) for year in years]


def per_house_view(result: SweepResult) -> dict:
    """Result scaled to one household: aggregated absolute figures are
    divided by the house count, individual averages pass through."""
    n = result.n_houses if result.mode == MODE_AGGREGATED else 1
    return {
        "p_kw": result.p_kw / n,
        "b_kwh": result.b_kwh / n,
        "npv_total": result.summary.npv_total / n,
        "sc_pct": result.metrics.sc_pct,
        "ss_pct": result.metrics.ss_pct,
        "es_pct": result.metrics.es_pct,
        "cs_pct": result.metrics.cs_pct,
        "co2_reduction_pct": result.metrics.co2_reduction_pct,
    }


def compare_modes(scenario: ScenarioConfig, year: int | None = None,
                  data: InputData | None = None) -> ModeComparison:
    """Individual-average vs aggregated (per-house) analysis of one year.

    Aggregated absolute quantities are divided by the number of houses so
    the two columns are comparable; percentage indices are intensive and
    compare directly.
    """
    if scenario.district.n_houses < 2:
        raise ValueError("mode comparison needs at least 2 houses")
    if year is None:
        year = scenario.finance.project_start_year
    if data is None:
        data = prepare_inputs(scenario)
    individual = sweep(replace(scenario, mode=MODE_INDIVIDUAL), year, data)
    aggregated = sweep(replace(scenario, mode=MODE_AGGREGATED), year, data)
    indiv_view = per_house_view(individual)
    agg_view = per_house_view(aggregated)
    deltas = {key: agg_view[key] - indiv_view[key] for key in agg_view}
    return ModeComparison(individual=individual, aggregated=aggregated, deltas=deltas)
