"""Scenario configuration: typed config objects and strict YAML parsing.

Unknown keys are rejected with their dotted path (silent typos are the main
failure mode of scenario tools); every default the parser applies is
recorded so the run manifest can reproduce the resolved configuration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import yaml

from .dispatch import Tariff
from .finance import (
    R_BATTERY_FIXED,
    R_BATTERY_TRAJECTORY,
    TECH_PV_BATTERY,
    TECH_PV_EV,
    FinanceParams,
    TechnologyCostSchedule,
    TransportParams,
)
from .fleet import FleetConfig
from .metrics import EmissionFactors

MODE_INDIVIDUAL = "individual"
MODE_AGGREGATED = "aggregated"


class ScenarioConfigError(ValueError):
    """Raised for unknown keys, missing files, or out-of-range values."""


@dataclass(frozen=True)
class DistrictConfig:
    demand_csv: str | None = None
    synth_kind: str = "residential"
    n_houses: int = 50
    max_pv_kw_per_house: float = 10.0

    def __post_init__(self):
        if self.n_houses < 1:
            raise ScenarioConfigError("district.n_houses must be >= 1")
        if self.max_pv_kw_per_house <= 0:
            raise ScenarioConfigError("district.max_pv_kw_per_house must be > 0")
        if self.synth_kind not in ("residential", "commercial"):
            raise ScenarioConfigError(f"district.synth_kind {self.synth_kind!r} unknown")


@dataclass(frozen=True)
class PvSourceConfig:
    cf_csv: str | None = None
    target_annual_cf: float = 0.135
    annual_degradation: float = 0.005

    def __post_init__(self):
        if not (0.0 < self.target_annual_cf < 1.0):
            raise ScenarioConfigError("pv.target_annual_cf must lie in (0, 1)")
        if self.annual_degradation < 0:
            raise ScenarioConfigError("pv.annual_degradation must be >= 0")


@dataclass(frozen=True)
class StorageParams:
    charge_efficiency: float = 0.95
    discharge_efficiency: float = 0.95
    power_limit_kw: float | None = None
    calendar_degradation: float = 0.01
    cycle_degradation: float = 5e-5
    replacement_threshold: float = 0.8


@dataclass(frozen=True)
class SweepGrid:
    pv_step_kw: float = 1.0
    pv_max_kw: float | None = None  # defaults to the per-house rooftop cap
    battery_step_kwh: float = 1.0
    battery_max_kwh: float = 10.0

    def __post_init__(self):
        if self.pv_step_kw <= 0 or self.battery_step_kwh <= 0:
            raise ScenarioConfigError("sweep steps must be > 0")
        if self.battery_max_kwh < 0:
            raise ScenarioConfigError("sweep.battery_max_kwh must be >= 0")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    seed: int = 0
    technology: str = TECH_PV_EV
    fit: bool = True
    mode: str = MODE_AGGREGATED
    district: DistrictConfig = field(default_factory=DistrictConfig)
    sweep: SweepGrid = field(default_factory=SweepGrid)
    fleet: FleetConfig = field(default_factory=FleetConfig)
    tariff: Tariff = field(default_factory=Tariff)
    costs: TechnologyCostSchedule = field(default_factory=TechnologyCostSchedule)
    finance: FinanceParams = field(default_factory=FinanceParams)
    emissions: EmissionFactors = field(default_factory=EmissionFactors)
    transport: TransportParams = field(default_factory=TransportParams)
    storage: StorageParams = field(default_factory=StorageParams)
    pv: PvSourceConfig = field(default_factory=PvSourceConfig)
    applied_defaults: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.technology not in (TECH_PV_BATTERY, TECH_PV_EV):
            raise ScenarioConfigError(f"technology {self.technology!r} unknown")
        if self.mode not in (MODE_INDIVIDUAL, MODE_AGGREGATED):
            raise ScenarioConfigError(f"mode {self.mode!r} unknown")


def _require(condition: bool, message: str):
    if not condition:
        raise ScenarioConfigError(message)


class _Section:
    """Tracks consumed keys of one mapping and the defaults applied."""

    def __init__(self, data: dict, path: str, defaults: dict):
        if not isinstance(data, dict):
            raise ScenarioConfigError(f"{path or 'config'} must be a mapping")
        self.data = dict(data)
        self.path = path
        self.defaults = defaults

    def _key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def take(self, name: str, default):
        if name in self.data:
            return self.data.pop(name)
        self.defaults[self._key(name)] = default
        return default

    def has(self, name: str) -> bool:
        return name in self.data

    def subsection(self, name: str) -> "_Section":
        raw = self.data.pop(name, {})
        if raw is None:
            raw = {}
        return _Section(raw, self._key(name), self.defaults)

    def finish(self):
        if self.data:
            key = sorted(self.data)[0]
            raise ScenarioConfigError(f"unknown key {self._key(key)!r}")


def _number(section: _Section, name: str, default, minimum=None, maximum=None,
            allow_none=False):
    value = section.take(name, default)
    if value is None:
        _require(allow_none, f"{section._key(name)} must be a number")
        return None
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{section._key(name)} must be a number")
    if minimum is not None:
        _require(value >= minimum, f"{section._key(name)} must be >= {minimum}")
    if maximum is not None:
        _require(value <= maximum, f"{section._key(name)} must be <= {maximum}")
    return float(value)


def _integer(section: _Section, name: str, default, minimum=None):
    value = section.take(name, default)
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"{section._key(name)} must be an integer")
    if minimum is not None:
        _require(value >= minimum, f"{section._key(name)} must be >= {minimum}")
    return int(value)


def _choice(section: _Section, name: str, default, options):
    value = section.take(name, default)
    _require(value in options, f"{section._key(name)} must be one of {sorted(options)}")
    return value


def _boolean(section: _Section, name: str, default):
    value = section.take(name, default)
    _require(isinstance(value, bool), f"{section._key(name)} must be true/false")
    return value


def _string_or_none(section: _Section, name: str, default):
    value = section.take(name, default)
    _require(value is None or isinstance(value, str),
             f"{section._key(name)} must be a string or null")
    return value


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    defaults: dict = {}
    root = _Section(raw, "", defaults)

    name = root.take("name", "scenario")
    _require(isinstance(name, str) and name, "name must be a non-empty string")
    seed = _integer(root, "seed", 0, minimum=0)
    technology = _choice(root, "technology", TECH_PV_EV, (TECH_PV_BATTERY, TECH_PV_EV))
    fit = _boolean(root, "fit", True)
    mode = _choice(root, "mode", MODE_AGGREGATED, (MODE_INDIVIDUAL, MODE_AGGREGATED))

    sec = root.subsection("district")
    district = DistrictConfig(
        demand_csv=_string_or_none(sec, "demand_csv", None),
        synth_kind=_choice(sec, "synth_kind", "residential", ("residential", "commercial")),
        n_houses=_integer(sec, "n_houses", 50, minimum=1),
        max_pv_kw_per_house=_number(sec, "max_pv_kw_per_house", 10.0, minimum=1e-9),
    )
    sec.finish()

    sec = root.subsection("sweep")
    sweep = SweepGrid(
        pv_step_kw=_number(sec, "pv_step_kw", 1.0, minimum=1e-9),
        pv_max_kw=_number(sec, "pv_max_kw", None, minimum=0.0, allow_none=True),
        battery_step_kwh=_number(sec, "battery_step_kwh", 1.0, minimum=1e-9),
        battery_max_kwh=_number(sec, "battery_max_kwh", 10.0, minimum=0.0),
    )
    sec.finish()

    fleet_present = root.has("fleet")
    sec = root.subsection("fleet")
    fleet = FleetConfig(
        n_ev=_integer(sec, "n_ev", district.n_houses, minimum=0),
        battery_kwh_per_ev=_number(sec, "battery_kwh_per_ev", 40.0, minimum=1e-9),
        v2h_fraction=_number(sec, "v2h_fraction", 0.5, minimum=0.0, maximum=1.0),
        daytime_availability=_number(sec, "daytime_availability", 0.75, minimum=0.0, maximum=1.0),
        trips_per_day=_integer(sec, "trips_per_day", 3, minimum=0),
        energy_per_trip_kwh=_number(sec, "energy_per_trip_kwh", 1.1, minimum=0.0),
        driving_enabled=_boolean(sec, "driving", True),
        seed=seed,
    )
    sec.finish()
    if technology == TECH_PV_BATTERY and fleet_present:
        warnings.warn(
            "technology is pv_plus_battery: the fleet section is ignored",
            stacklevel=2,
        )
        fleet = FleetConfig(n_ev=district.n_houses, seed=seed)

    sec = root.subsection("tariff")
    tariff = Tariff(
        import_price=_number(sec, "import_price", 0.22, minimum=0.0),
        export_price=_number(sec, "export_price", 0.09, minimum=0.0),
    )
    sec.finish()

    sec = root.subsection("costs")
    rates = sec.subsection("annual_rates")
    annual_rates = {
        "pv": _number(rates, "pv", 0.925, minimum=1e-9, maximum=1.0),
        "battery": _number(rates, "battery", 0.94, minimum=1e-9, maximum=1.0),
        "ev_add": _number(rates, "ev_add", 0.81, minimum=1e-9, maximum=1.0),
    }
    rates.finish()
    costs = TechnologyCostSchedule(
        pv_cost_0=_number(sec, "pv_usd_per_kw", 2200.0, minimum=0.0),
        battery_cost_0=_number(sec, "battery_usd_per_kwh", 1182.0, minimum=0.0),
        ev_add_cost_0=_number(sec, "ev_add_usd_per_kwh", 200.0, minimum=0.0),
        annual_rates=annual_rates,
        base_year=_integer(sec, "base_year", 2020),
        m_pv=_number(sec, "pv_maintenance_usd_per_kw", None, minimum=0.0, allow_none=True),
        m_pv_fraction=_number(sec, "pv_maintenance_fraction", 0.01, minimum=0.0),
        r_battery_mode=_choice(sec, "replacement_cost_source", R_BATTERY_TRAJECTORY,
                               (R_BATTERY_TRAJECTORY, R_BATTERY_FIXED)),
        r_battery_fixed=_number(sec, "replacement_cost_usd_per_kwh", 0.0, minimum=0.0),
    )
    sec.finish()

    sec = root.subsection("finance")
    finance = FinanceParams(
        discount_rate=_number(sec, "discount_rate", 0.03, minimum=-0.99),
        project_years=_integer(sec, "project_years", 25, minimum=1),
        project_start_year=_integer(sec, "project_start_year", costs.base_year),
    )
    sec.finish()

    sec = root.subsection("emissions")
    emissions = EmissionFactors(
        grid_kg_per_kwh=_number(sec, "grid_kg_per_kwh", 0.522, minimum=0.0),
        gasoline_kg_per_l=_number(sec, "gasoline_kg_per_l", 2.3, minimum=0.0),
    )
    sec.finish()

    sec = root.subsection("transport")
    transport = TransportParams(
        n_vehicles=1,  # resolved per analysis: fleet size aggregated, 1 per house
        annual_km=_number(sec, "annual_km", 6368.0, minimum=1e-9),
        gasoline_km_per_l=_number(sec, "gasoline_km_per_l", 12.6, minimum=1e-9),
        gasoline_price=_number(sec, "gasoline_price_usd_per_l", 1.29, minimum=1e-9),
        gasoline_co2_kg_per_l=emissions.gasoline_kg_per_l,
        ev_battery_kwh=fleet.battery_kwh_per_ev,
        ev_km_per_kwh=_number(sec, "ev_km_per_kwh", 5.3, minimum=1e-9),
    )
    sec.finish()

    sec = root.subsection("storage")
    storage = StorageParams(
        charge_efficiency=_number(sec, "charge_efficiency", 0.95, minimum=1e-9, maximum=1.0),
        discharge_efficiency=_number(sec, "discharge_efficiency", 0.95, minimum=1e-9, maximum=1.0),
        power_limit_kw=_number(sec, "power_limit_kw", None, minimum=0.0, allow_none=True),
        calendar_degradation=_number(sec, "calendar_degradation", 0.01, minimum=0.0, maximum=1.0),
        cycle_degradation=_number(sec, "cycle_degradation", 5e-5, minimum=0.0, maximum=1.0),
        replacement_threshold=_number(sec, "replacement_threshold", 0.8, minimum=1e-9, maximum=1.0 - 1e-9),
    )
    sec.finish()

    sec = root.subsection("pv")
    pv = PvSourceConfig(
        cf_csv=_string_or_none(sec, "cf_csv", None),
        target_annual_cf=_number(sec, "target_annual_cf", 0.135, minimum=1e-9, maximum=1.0 - 1e-9),
        annual_degradation=_number(sec, "annual_degradation", 0.005, minimum=0.0),
    )
    sec.finish()

    root.finish()
    return ScenarioConfig(
        name=name, seed=seed, technology=technology, fit=fit, mode=mode,
        district=district, sweep=sweep, fleet=fleet, tariff=tariff, costs=costs,
        finance=finance, emissions=emissions, transport=transport, storage=storage,
        pv=pv, applied_defaults=defaults,
    )


def parse_scenario(path) -> ScenarioConfig:
    """Load and strictly validate a YAML scenario file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ScenarioConfigError(f"scenario file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioConfigError(f"invalid YAML in {path}: {exc}") from exc
    if raw is None:
        raw = {}
    return scenario_from_dict(raw)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Fully-resolved mapping; parsing it back reproduces the config exactly."""
    out = {
        "name": config.name,
        "seed": config.seed,
        "technology": config.technology,
        "fit": config.fit,
        "mode": config.mode,
        "district": {
            "demand_csv": config.district.demand_csv,
            "synth_kind": config.district.synth_kind,
            "n_houses": config.district.n_houses,
            "max_pv_kw_per_house": config.district.max_pv_kw_per_house,
        },
        "sweep": {
            "pv_step_kw": config.sweep.pv_step_kw,
            "pv_max_kw": config.sweep.pv_max_kw,
            "battery_step_kwh": config.sweep.battery_step_kwh,
            "battery_max_kwh": config.sweep.battery_max_kwh,
        },
        "tariff": {
            "import_price": config.tariff.import_price,
            "export_price": config.tariff.export_price,
        },
        "costs": {
            "pv_usd_per_kw": config.costs.pv_cost_0,
            "battery_usd_per_kwh": config.costs.battery_cost_0,
            "ev_add_usd_per_kwh": config.costs.ev_add_cost_0,
            "annual_rates": dict(config.costs.annual_rates),
            "base_year": config.costs.base_year,
            "pv_maintenance_usd_per_kw": config.costs.m_pv,
            "pv_maintenance_fraction": config.costs.m_pv_fraction,
            "replacement_cost_source": config.costs.r_battery_mode,
            "replacement_cost_usd_per_kwh": config.costs.r_battery_fixed,
        },
        "finance": {
            "discount_rate": config.finance.discount_rate,
            "project_years": config.finance.project_years,
            "project_start_year": config.finance.project_start_year,
        },
        "emissions": {
            "grid_kg_per_kwh": config.emissions.grid_kg_per_kwh,
            "gasoline_kg_per_l": config.emissions.gasoline_kg_per_l,
        },
        "transport": {
            "annual_km": config.transport.annual_km,
            "gasoline_km_per_l": config.transport.gasoline_km_per_l,
            "gasoline_price_usd_per_l": config.transport.gasoline_price,
            "ev_km_per_kwh": config.transport.ev_km_per_kwh,
        },
        "storage": {
            "charge_efficiency": config.storage.charge_efficiency,
            "discharge_efficiency": config.storage.discharge_efficiency,
            "power_limit_kw": config.storage.power_limit_kw,
            "calendar_degradation": config.storage.calendar_degradation,
            "cycle_degradation": config.storage.cycle_degradation,
            "replacement_threshold": config.storage.replacement_threshold,
        },
        "pv": {
            "cf_csv": config.pv.cf_csv,
            "target_annual_cf": config.pv.target_annual_cf,
            "annual_degradation": config.pv.annual_degradation,
        },
    }
    if config.technology == TECH_PV_EV:
        out["fleet"] = {
            "n_ev": config.fleet.n_ev,
            "battery_kwh_per_ev": config.fleet.battery_kwh_per_ev,
            "v2h_fraction": config.fleet.v2h_fraction,
            "daytime_availability": config.fleet.daytime_availability,
            "trips_per_day": config.fleet.trips_per_day,
            "energy_per_trip_kwh": config.fleet.energy_per_trip_kwh,
            "driving": config.fleet.driving_enabled,
        }
    return out


def emit_scenario(config: ScenarioConfig) -> str:
    return yaml.safe_dump(scenario_to_dict(config), sort_keys=True)
