"""Technology cost trajectories and discounted cash-flow metrics.

All prices are USD (converted at a fixed 110 yen/$ upstream of the inputs).
Component costs decline by a constant multiplicative factor per year from
their base-year anchors; projects are valued as the discounted stream of
yearly savings against a no-system baseline, minus the upfront system cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dispatch import DispatchResult, Tariff

COMPONENT_PV = "pv"
COMPONENT_BATTERY = "battery"
COMPONENT_EV_ADD = "ev_add"

TECH_PV_BATTERY = "pv_plus_battery"
TECH_PV_EV = "pv_plus_ev"

R_BATTERY_TRAJECTORY = "battery_trajectory"
R_BATTERY_FIXED = "fixed"


@dataclass(frozen=True)
class TechnologyCostSchedule:
    """Base-year unit costs and annual decline factors per component.

    PV in $/kW, battery and EV-additional in $/kWh. The EV-additional cost
    (EV-minus-ICE premium plus the V2H unit) is expressed per kWh of the
    full vehicle battery. PV maintenance defaults to a fraction of the
    project-start-year PV capex per kW per year.
    """

    pv_cost_0: float = 2200.0
    battery_cost_0: float = 1182.0
    ev_add_cost_0: float = 200.0
    annual_rates: dict = field(
        default_factory=lambda: {"pv": 0.925, "battery": 0.94, "ev_add": 0.81}
    )
    base_year: int = 2020
    m_pv: float | None = None
    m_pv_fraction: float = 0.01
    r_battery_mode: str = R_BATTERY_TRAJECTORY
    r_battery_fixed: float = 0.0

    def __post_init__(self):
        for cost in (self.pv_cost_0, self.battery_cost_0, self.ev_add_cost_0):
            if cost < 0:
                raise ValueError("base costs must be >= 0")
        for name in (COMPONENT_PV, COMPONENT_BATTERY, COMPONENT_EV_ADD):
            rate = self.annual_rates.get(name)
            if rate is None or not (0.0 < rate <= 1.0):
                raise ValueError(f"annual rate for {name!r} must lie in (0, 1]")
        if self.r_battery_mode not in (R_BATTERY_TRAJECTORY, R_BATTERY_FIXED):
            raise ValueError(f"unknown r_battery_mode {self.r_battery_mode!r}")

    def pv_maintenance(self, start_year: int) -> float:
        """$/kW/yr PV maintenance (incl. inverter replacement), frozen at project start."""
        if self.m_pv is not None:
            return self.m_pv
        return self.m_pv_fraction * cost_at_year(self, COMPONENT_PV, start_year)

    def battery_replacement_cost(self, year: int) -> float:
        """$/kWh charged when a pack is replaced in the given calendar year."""
        if self.r_battery_mode == R_BATTERY_FIXED:
            return self.r_battery_fixed
        return cost_at_year(self, COMPONENT_BATTERY, year)


@dataclass(frozen=True)
class TransportParams:
    """Vehicle fleet and fuel parameters for the gasoline-displacement stream."""

    n_vehicles: int = 1
    annual_km: float = 6368.0
    gasoline_km_per_l: float = 12.6
    gasoline_price: float = 1.29
    gasoline_co2_kg_per_l: float = 2.3
    ev_battery_kwh: float = 40.0
    ev_km_per_kwh: float = 5.3

    def __post_init__(self):
        if self.n_vehicles < 0:
            raise ValueError("n_vehicles must be >= 0")
        for value in (self.annual_km, self.gasoline_km_per_l, self.gasoline_price,
                      self.gasoline_co2_kg_per_l, self.ev_battery_kwh, self.ev_km_per_kwh):
            if value <= 0:
                raise ValueError("transport parameters must be > 0")

    def annual_gasoline_cost(self) -> float:
        """$/yr spent on gasoline by the displaced ICE vehicles."""
        return self.n_vehicles * self.annual_km / self.gasoline_km_per_l * self.gasoline_price

    def annual_gasoline_litres(self) -> float:
        return self.n_vehicles * self.annual_km / self.gasoline_km_per_l


@dataclass(frozen=True)
class FinanceParams:
    """Discount rate and project horizon."""

    discount_rate: float = 0.03
    project_years: int = 25
    project_start_year: int = 2020

    def __post_init__(self):
        if self.discount_rate <= -1.0:
            raise ValueError("discount_rate must be > -1")
        if self.project_years < 1:
            raise ValueError("project_years must be >= 1")


@dataclass(frozen=True)
class FinancialSummary:
    """Project valuation for one (PV, storage, start-year) configuration."""

    npv_total: float
    npv_electricity: float
    npv_gasoline: float
    irr: float | None
    spb_years: float | None
    capex: float
    cashflows: tuple

    def __post_init__(self):
        gap = abs(self.npv_total - (self.npv_electricity + self.npv_gasoline))
        if gap > 1e-6 * max(1.0, abs(self.npv_total)):
            raise ValueError("npv_total must equal npv_electricity + npv_gasoline")


def cost_at_year(schedule: TechnologyCostSchedule, component: str, year: int) -> float:
    """Unit cost of a component after its multiplicative annual decline."""
    if year < schedule.base_year:
        raise ValueError(f"year {year} precedes base year {schedule.base_year}")
    rate = schedule.annual_rates[component]
    cost_0 = {
        COMPONENT_PV: schedule.pv_cost_0,
        COMPONENT_BATTERY: schedule.battery_cost_0,
        COMPONENT_EV_ADD: schedule.ev_add_cost_0,
    }[component]
    return cost_0 * rate ** (year - schedule.base_year)


def system_cost(
    p_kw: float,
    b_kwh: float,
    year: int,
    schedule: TechnologyCostSchedule,
    technology: str = TECH_PV_BATTERY,
    v2h_fraction: float = 0.5,
) -> float:
    """Upfront investment for p kW of PV plus b kWh of storage.

    For PV+EV, ``b_kwh`` is the V2H-usable capacity while the EV-additional
    cost applies to the full vehicle battery, so the usable-kWh unit price
    is the trajectory value divided by the V2H fraction.
    """
    if p_kw < 0 or b_kwh < 0:
        raise ValueError("capacities must be >= 0")
    pv_part = p_kw * cost_at_year(schedule, COMPONENT_PV, year)
    if technology == TECH_PV_EV:
        if not (0.0 < v2h_fraction <= 1.0):
            raise ValueError("v2h_fraction must lie in (0, 1]")
        storage_part = (b_kwh / v2h_fraction) * cost_at_year(schedule, COMPONENT_EV_ADD, year)
    else:
        storage_part = b_kwh * cost_at_year(schedule, COMPONENT_BATTERY, year)
    return pv_part + storage_part


def annual_electricity_cost(
    dispatch: DispatchResult,
    tariff: Tariff,
    p_kw: float,
    b_kwh: float,
    schedule: TechnologyCostSchedule,
    year: int,
    replacement_this_year: bool = False,
    start_year: int | None = None,
) -> float:
    """One year's net electricity bill: imports minus export credit plus
    PV maintenance, plus the battery replacement charge in replacement years.

    ``year`` is the calendar year of this project year (it prices the
    replacement); maintenance is frozen at ``start_year`` (defaults to
    ``year``).
    """
    cost = dispatch.e_import * tariff.import_price - dispatch.e_export * tariff.export_price
    cost += p_kw * schedule.pv_maintenance(start_year if start_year is not None else year)
    if replacement_this_year:
        cost += b_kwh * schedule.battery_replacement_cost(year)
    return cost


def npv_electricity(
    base_costs,
    system_costs,
    capex: float,
    params: FinanceParams,
) -> float:
    """Discounted sum of yearly savings (base minus system cost) less capex."""
    if len(base_costs) != params.project_years or len(system_costs) != params.project_years:
        raise ValueError("cost sequences must cover the full project horizon")
    rate = 1.0 + params.discount_rate
    total = 0.0
    for n, (base, system) in enumerate(zip(base_costs, system_costs), start=1):
        total += (base - system) / rate**n
    return total - capex


def annuity_factor(params: FinanceParams) -> float:
    """Present value of $1/yr over the project horizon."""
    rate = 1.0 + params.discount_rate
    return sum(1.0 / rate**n for n in range(1, params.project_years + 1))


def npv_gasoline(transport: TransportParams, params: FinanceParams) -> float:
    """Discounted gasoline spending avoided by electrified vehicles (no capex
    term; the EV premium lives in system_cost)."""
    return transport.annual_gasoline_cost() * annuity_factor(params)


def irr(cashflows, capex: float, bracket: tuple[float, float] = (-0.99, 10.0)) -> float | None:
    """Smallest discount rate zeroing the NPV of [-capex, F_1, ..., F_N].

    Scans the bracket for sign changes and bisects each down to
    |NPV| < 1e-6 * capex, returning the first root that certifies to that
    tolerance. Segments too steep to certify at double precision (poles
    hard against -1 with sign-flipping flows) are skipped; None means no
    certifiable root exists on the bracket (e.g. all flows negative).
    """
    flows = list(cashflows)
    if capex <= 0:
        raise ValueError("capex must be > 0 for an IRR to be meaningful")

    def npv_at(rate: float) -> float:
        total = -capex
        for n, f in enumerate(flows, start=1):
            total += f / (1.0 + rate) ** n
        return total

    tol = 1e-6 * capex
    lo, hi = bracket
    n_scan = 2000
    prev_d = lo
    prev_v = npv_at(lo)
    for i in range(1, n_scan + 1):
        d = lo + (hi - lo) * i / n_scan
        v = npv_at(d)
        if abs(prev_v) < tol:
            return prev_d
        if prev_v * v <= 0.0:
            left, right, v_left = prev_d, d, prev_v
            root = None
            for _ in range(200):
                mid = 0.5 * (left + right)
                v_mid = npv_at(mid)
                if abs(v_mid) < tol:
                    root = mid
                    break
                if v_left * v_mid <= 0.0:
                    right = mid
                else:
                    left, v_left = mid, v_mid
            if root is not None:
                return root
        prev_d, prev_v = d, v
    return None


def spb(cashflows, capex: float) -> float | None:
    """Years until cumulative undiscounted savings repay the capex.

    Interpolates linearly inside the repayment year; returns None when the
    flows never cover the investment within the horizon.
    """
    cumulative = 0.0
    for year, flow in enumerate(cashflows, start=1):
        prev = cumulative
        cumulative += flow
        if cumulative >= capex:
            if flow <= 0:
                return float(year)
            return (year - 1) + (capex - prev) / flow
    return None
