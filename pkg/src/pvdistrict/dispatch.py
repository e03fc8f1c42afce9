"""Hourly energy-balance simulation for PV plus stationary or EV storage.

Dispatch priority (greedy self-consumption, flat tariffs): PV serves load
directly, surplus charges storage up to the accessible headroom, the rest
exports; deficits discharge storage down to the accessible floor, the rest
imports. EV storage additionally loses driving energy at trip hours and is
grid-charged back up to the reserve floor at midnight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .profiles import HourlyProfile
from .pv import PvConfig, generation

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal install here
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

KIND_NONE = "none"
KIND_STATIONARY = "stationary"
KIND_EV_INDIVIDUAL = "ev_individual"
KIND_EV_POOLED = "ev_pooled"
_STORAGE_KINDS = (KIND_NONE, KIND_STATIONARY, KIND_EV_INDIVIDUAL, KIND_EV_POOLED)


@dataclass(frozen=True)
class Tariff:
    """Flat import/export electricity prices ($/kWh); export 0 without FIT."""

    import_price: float = 0.22
    export_price: float = 0.09

    def __post_init__(self):
        if self.import_price < 0 or self.export_price < 0:
            raise ValueError("tariff prices must be >= 0")


@dataclass(frozen=True)
class StorageConfig:
    """Storage capacity, losses, accessibility, and aging parameters.

    ``availability`` caps the accessible share of stored energy per hour
    (EV fleets away from home); ``driving_kwh`` is deducted from the state
    of charge at trip hours. Both default to a fully available, non-driving
    battery. The midnight grid top-up applies to the EV kinds only.
    """

    kind: str = KIND_STATIONARY
    nominal_kwh: float = 0.0
    soc_floor_kwh: float = 0.0
    charge_efficiency: float = 0.95
    discharge_efficiency: float = 0.95
    power_limit_kw: float | None = None
    availability: np.ndarray | None = None
    driving_kwh: np.ndarray | None = None
    calendar_degradation: float = 0.01
    cycle_degradation: float = 5e-5
    replacement_threshold: float = 0.8

    def __post_init__(self):
        if self.kind not in _STORAGE_KINDS:
            raise ValueError(f"unknown storage kind {self.kind!r}")
        if self.nominal_kwh < 0:
            raise ValueError("nominal_kwh must be >= 0")
        if not 0.0 <= self.soc_floor_kwh <= self.nominal_kwh:
            raise ValueError("soc_floor_kwh must lie in [0, nominal_kwh]")
        for eta in (self.charge_efficiency, self.discharge_efficiency):
            if not (0.0 < eta <= 1.0):
                raise ValueError("efficiencies must lie in (0, 1]")
        if self.power_limit_kw is not None and self.power_limit_kw < 0:
            raise ValueError("power_limit_kw must be >= 0")
        if not (0.0 < self.replacement_threshold < 1.0):
            raise ValueError("replacement_threshold must lie in (0, 1)")

    @property
    def grid_topup(self) -> bool:
        return self.kind in (KIND_EV_INDIVIDUAL, KIND_EV_POOLED)

    @classmethod
    def none(cls) -> "StorageConfig":
        return cls(kind=KIND_NONE, nominal_kwh=0.0)


@dataclass
class DispatchResult:
    """Annual energy flows (kWh) plus the underlying hourly traces."""

    e_import: float
    e_export: float
    e_pv: float
    e_pv_to_load: float
    e_batt_to_load: float
    e_pv_to_batt: float
    e_grid_to_batt: float
    e_driving: float
    e_losses: float
    e_load: float
    soc_start: float
    soc_end: float
    traces: dict = field(default_factory=dict, repr=False)
    replacement_occurred: bool = False


@njit(cache=True)
def _run_hours(demand, pvgen, avail, driving, nominal, soc_floor,
               eta_c, eta_d, power_limit, health, soc0, topup):
    n = demand.shape[0]
    pv_to_load = np.zeros(n)
    pv_to_batt = np.zeros(n)
    batt_to_load = np.zeros(n)
    grid_import = np.zeros(n)
    grid_export = np.zeros(n)
    grid_to_batt = np.zeros(n)
    drawn_arr = np.zeros(n)
    losses = np.zeros(n)
    soc_trace = np.zeros(n)

    soc = soc0
    for h in range(n):
        loss = 0.0
        g2b = 0.0
        # Midnight reserve top-up from grid (EV kinds only).
        if topup and h % 24 == 0 and soc < soc_floor:
            stored = soc_floor - soc
            purchase = stored / eta_c
            g2b = purchase
            loss += purchase - stored
            soc = soc_floor
        # Driving pulls straight from the battery, below the reserve if needed.
        drawn = driving[h]
        if drawn > soc:
            drawn = soc
        soc -= drawn
        drawn_arr[h] = drawn

        load = demand[h]
        gen = pvgen[h]
        p2l = min(load, gen)
        surplus = gen - p2l
        deficit = load - p2l

        # Charge: headroom limited by the hour's accessible capacity.
        cap = health * avail[h] * nominal
        headroom = cap - soc
        if headroom < 0.0:
            headroom = 0.0
        max_in = headroom / eta_c
        if max_in > power_limit:
            max_in = power_limit
        p2b = min(surplus, max_in)
        stored = p2b * eta_c
        soc += stored
        loss += p2b - stored
        exp = surplus - p2b

        # Discharge: never below the driving reserve nor the share held by
        # away vehicles ((1 - availability) of the current state of charge).
        floor_h = soc_floor
        alt = (1.0 - avail[h]) * soc
        if alt > floor_h:
            floor_h = alt
        avail_energy = soc - floor_h
        if avail_energy < 0.0:
            avail_energy = 0.0
        max_out = avail_energy * eta_d
        if max_out > power_limit:
            max_out = power_limit
        b2l = min(deficit, max_out)
        withdraw = b2l / eta_d
        soc -= withdraw
        loss += withdraw - b2l

        pv_to_load[h] = p2l
        pv_to_batt[h] = p2b
        batt_to_load[h] = b2l
        grid_export[h] = exp
        grid_to_batt[h] = g2b
        grid_import[h] = (deficit - b2l) + g2b
        losses[h] = loss
        soc_trace[h] = soc

    return (pv_to_load, pv_to_batt, batt_to_load, grid_import, grid_export,
            grid_to_batt, drawn_arr, losses, soc_trace)


def _as_array(profile) -> np.ndarray:
    if isinstance(profile, HourlyProfile):
        return profile.values
    return np.asarray(profile, dtype=float)


def simulate_year(
    demand,
    pv,
    storage: StorageConfig,
    tariff: Tariff | None = None,
    health: float = 1.0,
    soc_init: float | None = None,
    keep_traces: bool = True,
) -> DispatchResult:
    """Run the hourly balance for one year (or any equal-length horizon).

    ``demand`` and ``pv`` may be :class:`HourlyProfile` or plain arrays of
    equal length. ``tariff`` is accepted for interface completeness; flat
    prices do not change the greedy dispatch, pricing happens in finance.
    ``keep_traces=False`` drops the hourly arrays once the annual totals are
    built: capacity sweeps run thousands of years and only need the totals.
    """
    demand_arr = np.ascontiguousarray(_as_array(demand))
    pv_arr = np.ascontiguousarray(_as_array(pv))
    n = demand_arr.shape[0]
    if pv_arr.shape[0] != n:
        raise ValueError("demand and pv profiles must have equal length")
    if np.isnan(demand_arr).any() or np.isnan(pv_arr).any():
        raise ValueError("profiles must be gap-free before dispatch")
    if not (0.0 < health <= 1.0):
        raise ValueError("health must lie in (0, 1]")

    if storage.availability is None:
        avail = np.ones(n)
    else:
        avail = np.ascontiguousarray(_as_array(storage.availability))
        if avail.shape[0] != n:
            raise ValueError("availability profile length mismatch")
    if storage.driving_kwh is None:
        driving = np.zeros(n)
    else:
        driving = np.ascontiguousarray(_as_array(storage.driving_kwh))
        if driving.shape[0] != n:
            raise ValueError("driving profile length mismatch")

    if np.any(avail < 0) or np.any(avail > 1) or np.any(driving < 0):
        raise ValueError("storage accessible capacity negative")
    soc0 = storage.soc_floor_kwh if soc_init is None else float(soc_init)
    plim = np.inf if storage.power_limit_kw is None else float(storage.power_limit_kw)

    (pv_to_load, pv_to_batt, batt_to_load, grid_import, grid_export,
     grid_to_batt, drawn, losses, soc_trace) = _run_hours(
        demand_arr, pv_arr, avail, driving,
        float(storage.nominal_kwh), float(storage.soc_floor_kwh),
        float(storage.charge_efficiency), float(storage.discharge_efficiency),
        plim, float(health), soc0, storage.grid_topup,
    )

    traces = {}
    if keep_traces:
        traces = {
            "load": demand_arr,
            "pv": pv_arr,
            "pv_to_load": pv_to_load,
            "pv_to_batt": pv_to_batt,
            "batt_to_load": batt_to_load,
            "import": grid_import,
            "export": grid_export,
            "grid_to_batt": grid_to_batt,
            "driving": drawn,
            "losses": losses,
            "soc": soc_trace,
        }
    return DispatchResult(
        e_import=float(grid_import.sum()),
        e_export=float(grid_export.sum()),
        e_pv=float(pv_arr.sum()),
        e_pv_to_load=float(pv_to_load.sum()),
        e_batt_to_load=float(batt_to_load.sum()),
        e_pv_to_batt=float(pv_to_batt.sum()),
        e_grid_to_batt=float(grid_to_batt.sum()),
        e_driving=float(drawn.sum()),
        e_losses=float(losses.sum()),
        e_load=float(demand_arr.sum()),
        soc_start=soc0,
        soc_end=float(soc_trace[-1]) if n else soc0,
        traces=traces,
    )


@dataclass(frozen=True)
class ProjectParams:
    """Multi-year project horizon anchored at a calendar start year."""

    n_years: int = 25
    start_year: int = 2020

    def __post_init__(self):
        if self.n_years < 1:
            raise ValueError("n_years must be >= 1")


def simulate_project(
    demand,
    pv_cf: HourlyProfile,
    pv_cfg: PvConfig,
    storage: StorageConfig,
    tariff: Tariff | None = None,
    params: ProjectParams = ProjectParams(),
    keep_traces: bool = True,
) -> tuple[list[DispatchResult], list[int]]:
    """Run each project year with PV aging, battery health decay, and replacement.

    Battery health declines multiplicatively each year by the calendar rate
    plus the cycle rate times the full-equivalent cycles (energy withdrawn
    over nominal capacity). When health drops below the replacement
    threshold at a year boundary the pack is replaced (health resets to 1)
    and that project year is recorded; finance charges the replacement there.
    State of charge carries across year boundaries.
    """
    results: list[DispatchResult] = []
    replacement_years: list[int] = []
    health = 1.0
    soc = None
    for year_index in range(params.n_years):
        replaced = health < storage.replacement_threshold
        if replaced:
            health = 1.0
            replacement_years.append(year_index + 1)
        pv_gen = generation(pv_cf, pv_cfg, project_year=year_index)
        result = simulate_year(demand, pv_gen, storage, tariff, health=health,
                               soc_init=soc, keep_traces=keep_traces)
        result.replacement_occurred = replaced
        results.append(result)
        soc = result.soc_end
        if storage.nominal_kwh > 0:
            withdrawn = result.e_batt_to_load / storage.discharge_efficiency + result.e_driving
            fec = withdrawn / storage.nominal_kwh
            health *= 1.0 - storage.calendar_degradation - storage.cycle_degradation * fec
            if health <= 0:
                raise ValueError("storage health decayed to zero within a single year")
    return results, replacement_years
