"""EV fleet availability and driving-energy model for V2H / V2C storage.

Vehicles leave home for a configurable number of random one-hour trips per
day inside the daytime window. While away they cannot charge or discharge,
so the fleet's accessible battery fraction fluctuates; pooled mode replaces
the per-vehicle schedules with their long-run daytime average.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .profiles import DAYS_PER_YEAR, HOURS_PER_YEAR, UNIT_ENERGY_KWH, UNIT_FRACTION, HourlyProfile

# Daytime window during which trips can start (hour-of-day, half-open).
DAYTIME_START = 7
DAYTIME_END = 19
DAYTIME_HOURS = DAYTIME_END - DAYTIME_START

DEFAULT_TRIPS_PER_DAY = 3
DEFAULT_ENERGY_PER_TRIP_KWH = 1.1
KM_PER_TRIP = 5.8


@dataclass(frozen=True)
class TripSchedule:
    """Per-day trip start hours for one vehicle; shape (n_days, trips_per_day)."""

    trip_hours: np.ndarray
    energy_per_trip_kwh: float = DEFAULT_ENERGY_PER_TRIP_KWH

    def __post_init__(self):
        hours = np.asarray(self.trip_hours, dtype=np.int64)
        object.__setattr__(self, "trip_hours", hours)
        if hours.ndim != 2:
            raise ValueError("trip_hours must be (n_days, trips_per_day)")
        if hours.size and (hours.min() < DAYTIME_START or hours.max() >= DAYTIME_END):
            raise ValueError(f"trip hours must lie in [{DAYTIME_START}, {DAYTIME_END})")

    @property
    def n_days(self) -> int:
        return self.trip_hours.shape[0]

    @property
    def trips_per_day(self) -> int:
        return self.trip_hours.shape[1]

    def annual_driving_km(self) -> float:
        return self.trips_per_day * KM_PER_TRIP * self.n_days


@dataclass(frozen=True)
class FleetConfig:
    """Fleet size and the shared battery/availability assumptions."""

    n_ev: int = 50
    battery_kwh_per_ev: float = 40.0
    v2h_fraction: float = 0.5
    daytime_availability: float = 0.75
    trips_per_day: int = DEFAULT_TRIPS_PER_DAY
    energy_per_trip_kwh: float = DEFAULT_ENERGY_PER_TRIP_KWH
    driving_enabled: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_ev < 0:
            raise ValueError("n_ev must be >= 0")
        if not (0.0 <= self.v2h_fraction <= 1.0):
            raise ValueError("v2h_fraction must lie in [0, 1]")
        if not (0.0 <= self.daytime_availability <= 1.0):
            raise ValueError("daytime_availability must lie in [0, 1]")

    @property
    def fleet_battery_kwh(self) -> float:
        return self.n_ev * self.battery_kwh_per_ev

    @property
    def v2h_usable_kwh(self) -> float:
        """Battery capacity usable for the home/community (the rest is driving reserve)."""
        return self.v2h_fraction * self.fleet_battery_kwh


def _vehicle_rng(seed: int, vehicle_id: int) -> np.random.Generator:
    # Per-vehicle streams keyed on (seed, id) so results do not depend on
    # the order vehicles are sampled in.
    return np.random.default_rng(np.random.SeedSequence((seed, vehicle_id)))


def sample_trips(
    seed: int,
    n_days: int = DAYS_PER_YEAR,
    trips_per_day: int = DEFAULT_TRIPS_PER_DAY,
    vehicle_id: int = 0,
    energy_per_trip_kwh: float = DEFAULT_ENERGY_PER_TRIP_KWH,
) -> TripSchedule:
    """Draw, per day, ``trips_per_day`` distinct hours uniformly from the daytime window."""
    if trips_per_day > DAYTIME_HOURS:
        raise ValueError(f"trips_per_day must be <= {DAYTIME_HOURS}")
    if trips_per_day < 0 or n_days < 0:
        raise ValueError("n_days and trips_per_day must be >= 0")
    rng = _vehicle_rng(seed, vehicle_id)
    if trips_per_day == 0:
        return TripSchedule(np.empty((n_days, 0), dtype=np.int64), energy_per_trip_kwh)
    # argpartition of iid uniforms picks a uniform random subset per row.
    noise = rng.random((n_days, DAYTIME_HOURS))
    picks = np.argpartition(noise, trips_per_day - 1, axis=1)[:, :trips_per_day]
    return TripSchedule(np.sort(picks, axis=1) + DAYTIME_START, energy_per_trip_kwh)


def _away_mask(schedule: TripSchedule) -> np.ndarray:
    """Boolean (n_days, 24) matrix, True while the vehicle is on a trip."""
    mask = np.zeros((schedule.n_days, 24), dtype=bool)
    days = np.repeat(np.arange(schedule.n_days), schedule.trips_per_day)
    mask[days, schedule.trip_hours.ravel()] = True
    return mask


def availability_profile(fleet: FleetConfig, mode: str) -> list[HourlyProfile] | HourlyProfile:
    """Hourly accessible fraction of the fleet's V2H capacity.

    ``individual`` returns one profile per vehicle (0 during its trips,
    1 otherwise); ``pooled`` returns a single profile at the configured
    daytime availability inside the window and 1.0 overnight.
    """
    if mode == "pooled":
        values = np.ones(HOURS_PER_YEAR)
        hours = np.arange(HOURS_PER_YEAR) % 24
        daytime = (hours >= DAYTIME_START) & (hours < DAYTIME_END)
        values[daytime] = fleet.daytime_availability
        return HourlyProfile(values, UNIT_FRACTION)
    if mode == "individual":
        if fleet.n_ev < 1:
            raise ValueError("individual mode needs n_ev >= 1")
        profiles = []
        for vid in range(fleet.n_ev):
            schedule = sample_trips(
                fleet.seed, DAYS_PER_YEAR, fleet.trips_per_day, vid, fleet.energy_per_trip_kwh
            )
            avail = (~_away_mask(schedule)).astype(float).ravel()
            profiles.append(HourlyProfile(avail, UNIT_FRACTION))
        return profiles
    raise ValueError(f"unknown availability mode {mode!r}")


def driving_draw(fleet: FleetConfig, mode: str, schedule: TripSchedule | None = None) -> HourlyProfile:
    """Hourly battery energy consumed by driving.

    Individual mode deducts one trip's energy at each trip hour of the given
    vehicle schedule; pooled mode spreads the whole fleet's daily driving
    energy uniformly over the daytime window.
    """
    if not fleet.driving_enabled:
        return HourlyProfile(np.zeros(HOURS_PER_YEAR), UNIT_ENERGY_KWH)
    if mode == "individual":
        if schedule is None:
            raise ValueError("individual driving_draw needs a TripSchedule")
        if schedule.n_days != DAYS_PER_YEAR:
            raise ValueError("schedule must cover a full year")
        draw = _away_mask(schedule).astype(float) * schedule.energy_per_trip_kwh
        return HourlyProfile(draw.ravel(), UNIT_ENERGY_KWH)
    if mode == "pooled":
        per_hour = (
            fleet.n_ev * fleet.trips_per_day * fleet.energy_per_trip_kwh / DAYTIME_HOURS
        )
        values = np.zeros(HOURS_PER_YEAR)
        hours = np.arange(HOURS_PER_YEAR) % 24
        values[(hours >= DAYTIME_START) & (hours < DAYTIME_END)] = per_hour
        return HourlyProfile(values, UNIT_ENERGY_KWH)
    raise ValueError(f"unknown driving mode {mode!r}")


def min_availability_experiment(
    n_ev_range: list[int],
    n_days: int = 1000,
    seed: int = 0,
    trips_per_day: int = DEFAULT_TRIPS_PER_DAY,
) -> list[dict]:
    """Fleet-size sweep of daytime availability statistics.

    For each fleet size, samples independent trip schedules and reports the
    mean daytime available fraction and the mean (over days) of the daily
    minimum available fraction. With one vehicle the daily minimum is always
    zero; it climbs above ~0.6 once a few dozen vehicles share the pool.
    Fewer than 100 days gives unstable statistics and is rejected.
    """
    if n_days < 100:
        raise ValueError("n_days must be >= 100 for stable statistics")
    rows = []
    for n_ev in n_ev_range:
        if n_ev < 1:
            raise ValueError("fleet sizes must be >= 1")
        away_counts = np.zeros((n_days, DAYTIME_HOURS))
        for vid in range(n_ev):
            schedule = sample_trips(seed, n_days, trips_per_day, vehicle_id=vid)
            mask = np.zeros((n_days, DAYTIME_HOURS), dtype=bool)
            days = np.repeat(np.arange(n_days), trips_per_day)
            mask[days, schedule.trip_hours.ravel() - DAYTIME_START] = True
            away_counts += mask
        avail = 1.0 - away_counts / n_ev
        rows.append(
            {
                "n_ev": n_ev,
                "mean_daytime_avail": float(avail.mean()),
                "mean_daily_min_avail": float(avail.min(axis=1).mean()),
            }
        )
    return rows
