"""Energy sustainability indices, cost saving, and CO2 accounting."""

from __future__ import annotations

from dataclasses import dataclass

from .dispatch import DispatchResult
from .finance import FinancialSummary, TransportParams


@dataclass(frozen=True)
class EmissionFactors:
    """Regional grid and gasoline emission intensities."""

    grid_kg_per_kwh: float = 0.522
    gasoline_kg_per_l: float = 2.3

    def __post_init__(self):
        if self.grid_kg_per_kwh < 0 or self.gasoline_kg_per_l < 0:
            raise ValueError("emission factors must be >= 0")


@dataclass(frozen=True)
class MetricsRow:
    """Indices for one configuration, percentages except the raw emissions."""

    es_pct: float
    ss_pct: float
    sc_pct: float
    cs_pct: float
    co2_reduction_pct: float
    emi_base_kg: float
    emi_system_kg: float


def energy_indices(dispatch: DispatchResult) -> tuple[float, float, float]:
    """(energy sufficiency, self-sufficiency, self-consumption), all in %.

    ES is annual PV generation over load; SS is the load share served by PV
    directly or through storage; SC is the same served energy as a share of
    PV generation (100 by convention when there is no PV).
    """
    if dispatch.e_load <= 0:
        raise ValueError("energy indices need a positive annual load")
    served = dispatch.e_pv_to_load + dispatch.e_batt_to_load
    es = dispatch.e_pv / dispatch.e_load * 100.0
    ss = served / dispatch.e_load * 100.0
    sc = 100.0 if dispatch.e_pv == 0 else served / dispatch.e_pv * 100.0
    return es, ss, sc


def cost_saving(summary: FinancialSummary, annual_base_cost: float, n_years: int) -> float:
    """Annualized project NPV as a share of the baseline yearly energy cost (%)."""
    if annual_base_cost <= 0:
        raise ValueError("cost saving needs a positive baseline cost")
    return (summary.npv_total / n_years) / annual_base_cost * 100.0


def co2(
    dispatch_base: DispatchResult,
    dispatch_system: DispatchResult,
    factors: EmissionFactors,
    transport: TransportParams | None = None,
    include_gasoline: bool = False,
) -> tuple[float, float, float]:
    """(baseline kg/yr, system kg/yr, reduction %).

    The baseline burns grid electricity for the full load and, in scenarios
    that replace ICE vehicles, gasoline for the displaced driving. The
    system case only imports.
    """
    emi_base = factors.grid_kg_per_kwh * dispatch_base.e_import
    if include_gasoline:
        if transport is None:
            raise ValueError("gasoline emissions need transport parameters")
        emi_base += transport.annual_gasoline_litres() * factors.gasoline_kg_per_l
    if emi_base <= 0:
        raise ValueError("baseline emissions must be positive")
    emi_system = factors.grid_kg_per_kwh * dispatch_system.e_import
    reduction = (1.0 - emi_system / emi_base) * 100.0
    return emi_base, emi_system, reduction
