"""PV generation from capacity-factor profiles, with calibration and aging."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profiles import UNIT_CAPACITY_FACTOR, UNIT_ENERGY_KWH, HourlyProfile

# Rooftop area needed per installed kW of panels (m^2/kW).
DEFAULT_AREA_PER_KW = 8.29


class CalibrationError(ValueError):
    """Raised when a capacity-factor profile cannot reach its target mean."""


@dataclass(frozen=True)
class PvConfig:
    """Installed PV capacity and its annual output decline."""

    capacity_kw: float
    annual_degradation: float = 0.005
    max_capacity_kw: float = float("inf")

    def __post_init__(self):
        if self.capacity_kw < 0:
            raise ValueError("capacity_kw must be >= 0")
        if self.annual_degradation < 0:
            raise ValueError("annual_degradation must be >= 0")
        if self.max_capacity_kw <= 0:
            raise ValueError("max_capacity_kw must be > 0")
        if self.capacity_kw > self.max_capacity_kw:
            raise ValueError(
                f"capacity {self.capacity_kw} kW exceeds rooftop limit {self.max_capacity_kw} kW"
            )


def max_capacity_from_area(rooftop_m2: float, area_per_kw: float = DEFAULT_AREA_PER_KW) -> float:
    """Convert available rooftop area to an installable-capacity cap (kW)."""
    if rooftop_m2 < 0 or area_per_kw <= 0:
        raise ValueError("rooftop area must be >= 0 and density > 0")
    return rooftop_m2 / area_per_kw


def calibrate_cf(
    profile: HourlyProfile,
    target_annual_cf: float,
    max_iterations: int = 5,
    tolerance: float = 1e-4,
) -> HourlyProfile:
    """Scale a capacity-factor profile so its annual mean hits a target.

    Plain scaling overshoots 1.0 on spiky profiles, so scaled values are
    clipped and the scale factor re-applied until the post-clip mean is
    within ``tolerance`` of the target (at most ``max_iterations`` passes).
    """
    if profile.unit_tag != UNIT_CAPACITY_FACTOR:
        raise ValueError("calibrate_cf expects a capacity_factor profile")
    if not profile.is_gap_free():
        raise ValueError("calibrate_cf requires a gap-free profile")
    if not (0.0 < target_annual_cf < 1.0):
        raise ValueError("target_annual_cf must lie in (0, 1)")
    values = profile.values
    mean = float(values.mean())
    if mean <= 0.0:
        raise CalibrationError("profile mean is zero; nothing to scale")

    for _ in range(max_iterations):
        if abs(mean - target_annual_cf) <= tolerance:
            return profile.with_values(values)
        values = np.minimum(values * (target_annual_cf / mean), 1.0)
        mean = float(values.mean())
    if abs(mean - target_annual_cf) <= tolerance:
        return profile.with_values(values)
    raise CalibrationError(
        f"target mean {target_annual_cf} unreachable after {max_iterations} "
        f"clipping iterations; achieved {mean:.6f}"
    )


def generation(cf: HourlyProfile, cfg: PvConfig, project_year: int = 0) -> HourlyProfile:
    """Hourly PV output (kWh) for a project year, with panel aging applied.

    output[h] = cf[h] * capacity_kw * (1 - annual_degradation)**project_year
    """
    if cf.unit_tag != UNIT_CAPACITY_FACTOR:
        raise ValueError("generation expects a capacity_factor profile")
    if not cf.is_gap_free():
        raise ValueError("generation requires a gap-free profile")
    if project_year < 0:
        raise ValueError("project_year must be >= 0")
    scale = cfg.capacity_kw * (1.0 - cfg.annual_degradation) ** project_year
    return HourlyProfile(cf.values * scale, UNIT_ENERGY_KWH, cf.start_date)
