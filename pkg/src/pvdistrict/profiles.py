"""Hourly time-series ingestion, repair, and aggregation.

All downstream computation runs on fixed 8760-hour years (leap years are
rejected on ingest). Missing hours are carried as NaN and must be repaired
with :func:`fill_gaps` before a profile enters the dispatch simulation.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

HOURS_PER_YEAR = 8760
DAYS_PER_YEAR = 365

UNIT_ENERGY_KWH = "energy_kwh"
UNIT_CAPACITY_FACTOR = "capacity_factor"
UNIT_FRACTION = "fraction"
_VALID_UNITS = (UNIT_ENERGY_KWH, UNIT_CAPACITY_FACTOR, UNIT_FRACTION)


class ProfileError(ValueError):
    """Raised for malformed or inconsistent profile data."""


@dataclass(frozen=True)
class HourlyProfile:
    """One year of hourly values; index 0 is hour 00:00 of ``start_date``.

    ``values`` holds floats with NaN marking missing hours. Bounded units
    (capacity_factor, fraction) must stay within [0, 1]; energy values must
    be non-negative.
    """

    values: np.ndarray
    unit_tag: str = UNIT_ENERGY_KWH
    start_date: dt.date = field(default_factory=lambda: dt.date(2018, 1, 1))

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.shape[0] != HOURS_PER_YEAR:
            raise ProfileError(
                f"profile must have exactly {HOURS_PER_YEAR} hourly values, got {values.shape}"
            )
        if self.unit_tag not in _VALID_UNITS:
            raise ProfileError(f"unknown unit tag {self.unit_tag!r}")
        present = values[~np.isnan(values)]
        if present.size and present.min() < 0.0:
            raise ProfileError("negative energy: profile values must be >= 0")
        if self.unit_tag in (UNIT_CAPACITY_FACTOR, UNIT_FRACTION):
            if present.size and present.max() > 1.0 + 1e-12:
                raise ProfileError(f"{self.unit_tag} values must be <= 1")

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())

    def is_gap_free(self) -> bool:
        return self.n_missing == 0

    def with_values(self, values: np.ndarray) -> "HourlyProfile":
        return HourlyProfile(values, self.unit_tag, self.start_date)


@dataclass(frozen=True)
class ProfileStats:
    """Annual total and hourly extrema; missing hours are excluded."""

    annual_total_kwh: float
    hourly_max_kw: float
    hourly_min_kw: float
    n_missing: int


def _parse_timestamp(raw: str, row_no: int) -> dt.datetime:
    try:
        ts = dt.datetime.fromisoformat(raw.strip())
    except ValueError as exc:
        raise ProfileError(f"row {row_no}: malformed timestamp {raw!r}") from exc
    if ts.minute or ts.second or ts.microsecond:
        raise ProfileError(f"row {row_no}: timestamp {raw!r} is not on the hour")
    return ts


def _hour_index(ts: dt.datetime, year: int, row_no: int) -> int:
    if ts.year != year:
        raise ProfileError(
            f"row {row_no}: timestamp {ts.isoformat()} outside data year {year}"
        )
    idx = (ts.date() - dt.date(year, 1, 1)).days * 24 + ts.hour
    return idx


def _check_year(year: int) -> None:
    # The hourly index assumes a 365-day calendar throughout.
    if (year % 4 == 0 and year % 100 != 0) or year % 400 == 0:
        raise ProfileError(
            f"{year} is a leap year; only 8760-hour (non-leap) years are supported"
        )


def load_demand_csv(path) -> dict[str, HourlyProfile]:
    """Read a ``house_id,timestamp,kwh`` CSV into per-house profiles.

    Absent (house, hour) rows become missing values; duplicate rows,
    negative energy, malformed timestamps, and leap years are errors.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["house_id", "timestamp", "kwh"]:
            raise ProfileError(f"{path}: expected header 'house_id,timestamp,kwh'")
        year = None
        per_house: dict[str, np.ndarray] = {}
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ProfileError(f"row {row_no}: expected 3 fields, got {len(row)}")
            house, raw_ts, raw_kwh = row
            ts = _parse_timestamp(raw_ts, row_no)
            if year is None:
                year = ts.year
                _check_year(year)
            idx = _hour_index(ts, year, row_no)
            try:
                kwh = float(raw_kwh)
            except ValueError as exc:
                raise ProfileError(f"row {row_no}: malformed kwh value {raw_kwh!r}") from exc
            if math.isnan(kwh):
                raise ProfileError(f"row {row_no}: kwh value is NaN")
            if kwh < 0:
                raise ProfileError(f"row {row_no}: negative energy {kwh}")
            values = per_house.get(house)
            if values is None:
                values = np.full(HOURS_PER_YEAR, np.nan)
                per_house[house] = values
            if not math.isnan(values[idx]):
                raise ProfileError(
                    f"row {row_no}: duplicate entry for house {house!r} at {ts.isoformat()}"
                )
            values[idx] = kwh
    if year is None:
        raise ProfileError(f"{path}: no data rows")
    start = dt.date(year, 1, 1)
    return {
        house: HourlyProfile(vals, UNIT_ENERGY_KWH, start)
        for house, vals in sorted(per_house.items())
    }


def load_cf_csv(path) -> HourlyProfile:
    """Read a ``timestamp,cf`` CSV into a capacity-factor profile."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["timestamp", "cf"]:
            raise ProfileError(f"{path}: expected header 'timestamp,cf'")
        year = None
        values = np.full(HOURS_PER_YEAR, np.nan)
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ProfileError(f"row {row_no}: expected 2 fields, got {len(row)}")
            ts = _parse_timestamp(row[0], row_no)
            if year is None:
                year = ts.year
                _check_year(year)
            idx = _hour_index(ts, year, row_no)
            try:
                cf = float(row[1])
            except ValueError as exc:
                raise ProfileError(f"row {row_no}: malformed cf value {row[1]!r}") from exc
            if not (0.0 <= cf <= 1.0):
                raise ProfileError(f"row {row_no}: cf {cf} outside [0, 1]")
            if not math.isnan(values[idx]):
                raise ProfileError(f"row {row_no}: duplicate timestamp {ts.isoformat()}")
            values[idx] = cf
    if year is None:
        raise ProfileError(f"{path}: no data rows")
    return HourlyProfile(values, UNIT_CAPACITY_FACTOR, dt.date(year, 1, 1))


def fill_gaps(profile: HourlyProfile) -> HourlyProfile:
    """Repair missing hours from same-hour neighbours on adjacent days.

    A gap on (day d, hour h) takes the mean of present values at hour h on
    days {d-1, d, d+1}, clamped to valid days at the year edges. If the
    window holds no present value it widens symmetrically one day per step.
    Fills are always computed from the original values, so present values
    never change and the repair is order-independent and idempotent.
    """
    values = profile.values
    missing = np.where(np.isnan(values))[0]
    if missing.size == 0:
        return profile
    if missing.size == HOURS_PER_YEAR:
        raise ProfileError("unrepairable profile: all values missing")
    by_hour = values.reshape(DAYS_PER_YEAR, 24)
    filled = values.copy()
    for idx in missing:
        day, hour = divmod(int(idx), 24)
        column = by_hour[:, hour]
        width = 1
        while True:
            lo = max(0, day - width)
            hi = min(DAYS_PER_YEAR - 1, day + width)
            window = column[lo : hi + 1]
            present = window[~np.isnan(window)]
            if present.size:
                filled[idx] = float(present.mean())
                break
            width += 1
            if width > DAYS_PER_YEAR:
                # Same hour missing on every day of the year: fall back to
                # the overall mean so the repair still terminates.
                all_present = values[~np.isnan(values)]
                filled[idx] = float(all_present.mean())
                break
    return profile.with_values(filled)


def aggregate(profiles: list[HourlyProfile]) -> HourlyProfile:
    """Element-wise sum of gap-free energy profiles sharing a start date."""
    if not profiles:
        raise ProfileError("nothing to aggregate")
    first = profiles[0]
    total = np.zeros(HOURS_PER_YEAR)
    for p in profiles:
        if p.unit_tag != UNIT_ENERGY_KWH or p.unit_tag != first.unit_tag:
            raise ProfileError("aggregate requires energy_kwh profiles")
        if p.start_date != first.start_date:
            raise ProfileError("aggregate requires matching start dates")
        if not p.is_gap_free():
            raise ProfileError("aggregate requires gap-free profiles")
        total += p.values
    return HourlyProfile(total, UNIT_ENERGY_KWH, first.start_date)


def profile_stats(profile: HourlyProfile) -> ProfileStats:
    """Annual total and extrema over present values (kW read as kWh/h)."""
    values = profile.values
    present = values[~np.isnan(values)]
    if present.size == 0:
        return ProfileStats(0.0, float("nan"), float("nan"), int(values.size))
    return ProfileStats(
        annual_total_kwh=float(present.sum()),
        hourly_max_kw=float(present.max()),
        hourly_min_kw=float(present.min()),
        n_missing=int(np.isnan(values).sum()),
    )
