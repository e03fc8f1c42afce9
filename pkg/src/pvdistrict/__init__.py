"""District-scale techno-economic simulator for rooftop PV with battery or EV storage."""

__version__ = "0.1.0"

from .dispatch import (
    DispatchResult,
    ProjectParams,
    StorageConfig,
    Tariff,
    simulate_project,
    simulate_year,
)
from .finance import (
    FinanceParams,
    FinancialSummary,
    TechnologyCostSchedule,
    TransportParams,
    cost_at_year,
    irr,
    npv_electricity,
    npv_gasoline,
    spb,
    system_cost,
)
from .fleet import (
    FleetConfig,
    TripSchedule,
    availability_profile,
    driving_draw,
    min_availability_experiment,
    sample_trips,
)
from .metrics import EmissionFactors, MetricsRow, co2, cost_saving, energy_indices
from .optimizer import (
    ModeComparison,
    SweepResult,
    compare_modes,
    prepare_inputs,
    sweep,
    trajectory,
)
from .profiles import (
    HourlyProfile,
    ProfileStats,
    aggregate,
    fill_gaps,
    load_cf_csv,
    load_demand_csv,
    profile_stats,
)
from .pv import PvConfig, calibrate_cf, generation, max_capacity_from_area
from .scenario import ScenarioConfig, parse_scenario, scenario_from_dict

__all__ = [
    "DispatchResult", "ProjectParams", "StorageConfig", "Tariff",
    "simulate_project", "simulate_year",
    "FinanceParams", "FinancialSummary", "TechnologyCostSchedule",
    "TransportParams", "cost_at_year", "irr", "npv_electricity",
    "npv_gasoline", "spb", "system_cost",
    "FleetConfig", "TripSchedule", "availability_profile", "driving_draw",
    "min_availability_experiment", "sample_trips",
    "EmissionFactors", "MetricsRow", "co2", "cost_saving", "energy_indices",
    "ModeComparison", "SweepResult", "compare_modes", "prepare_inputs",
    "sweep", "trajectory",
    "HourlyProfile", "ProfileStats", "aggregate", "fill_gaps",
    "load_cf_csv", "load_demand_csv", "profile_stats",
    "PvConfig", "calibrate_cf", "generation", "max_capacity_from_area",
    "ScenarioConfig", "parse_scenario", "scenario_from_dict",
]
