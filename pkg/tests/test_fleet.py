"""Tests for EV trip sampling, availability, and driving draw."""

import numpy as np
import pytest

from pvdistrict.fleet import (
    DAYTIME_END,
    DAYTIME_START,
    FleetConfig,
    availability_profile,
    driving_draw,
    min_availability_experiment,
    sample_trips,
)
from pvdistrict.profiles import DAYS_PER_YEAR, HOURS_PER_YEAR


class TestSampleTrips:
    def test_distinct_hours_in_window(self):
        schedule = sample_trips(seed=1, n_days=50, trips_per_day=3)
        assert schedule.trip_hours.shape == (50, 3)
        for day in schedule.trip_hours:
            assert len(set(day.tolist())) == 3
            assert all(DAYTIME_START <= h < DAYTIME_END for h in day)

    def test_deterministic_for_seed(self):
        a = sample_trips(seed=42, n_days=100, trips_per_day=3)
        b = sample_trips(seed=42, n_days=100, trips_per_day=3)
        assert np.array_equal(a.trip_hours, b.trip_hours)
        c = sample_trips(seed=43, n_days=100, trips_per_day=3)
        assert not np.array_equal(a.trip_hours, c.trip_hours)

    def test_vehicle_streams_are_independent(self):
        a = sample_trips(seed=42, n_days=100, vehicle_id=0)
        b = sample_trips(seed=42, n_days=100, vehicle_id=1)
        assert not np.array_equal(a.trip_hours, b.trip_hours)

    def test_uniform_hour_frequencies(self):
        # Law of large numbers: over 10,000 days each window hour is picked
        # with frequency 3/12 = 0.25.
        schedule = sample_trips(seed=0, n_days=10_000, trips_per_day=3)
        counts = np.bincount(schedule.trip_hours.ravel() - DAYTIME_START, minlength=12)
        freqs = counts / 10_000
        assert np.all(np.abs(freqs - 0.25) < 0.01)

    def test_too_many_trips_rejected(self):
        with pytest.raises(ValueError, match="<= 12"):
            sample_trips(seed=0, n_days=1, trips_per_day=13)

    def test_annual_driving_distance(self):
        # 3 trips x 5.8 km x 365 days; the commonly quoted yearly figure is
        # 6,368 km, 17 km above this exact product.
        schedule = sample_trips(seed=0, n_days=DAYS_PER_YEAR, trips_per_day=3)
        assert schedule.annual_driving_km() == pytest.approx(6351.0)


class TestAvailability:
    def test_individual_zero_during_trips(self):
        fleet = FleetConfig(n_ev=1, seed=3)
        profile = availability_profile(fleet, "individual")[0]
        schedule = sample_trips(seed=3, n_days=DAYS_PER_YEAR, trips_per_day=3, vehicle_id=0)
        day0 = set(schedule.trip_hours[0].tolist())
        for hour in range(24):
            expected = 0.0 if hour in day0 else 1.0
            assert profile.values[hour] == expected

    def test_pooled_profile_levels(self):
        profile = availability_profile(FleetConfig(n_ev=50), "pooled")
        hours = np.arange(HOURS_PER_YEAR) % 24
        day = (hours >= DAYTIME_START) & (hours < DAYTIME_END)
        assert np.all(profile.values[day] == 0.75)
        assert np.all(profile.values[~day] == 1.0)

    def test_individual_mean_converges_to_pooled(self):
        # 50 vehicles x 365 days of Monte Carlo against 1 - 3/12.
        fleet = FleetConfig(n_ev=50, seed=11)
        profiles = availability_profile(fleet, "individual")
        stacked = np.stack([p.values for p in profiles])
        hours = np.arange(HOURS_PER_YEAR) % 24
        day = (hours >= DAYTIME_START) & (hours < DAYTIME_END)
        assert stacked[:, day].mean() == pytest.approx(0.75, abs=0.01)


class TestMinAvailabilityExperiment:
    def test_single_ev_daily_minimum_is_zero(self):
        rows = min_availability_experiment([1], n_days=200, seed=0)
        assert rows[0]["mean_daily_min_avail"] == 0.0

    def test_fleet_statistics(self):
        rows = min_availability_experiment([1, 40, 50], n_days=400, seed=1)
        by_n = {r["n_ev"]: r for r in rows}
        assert by_n[50]["mean_daytime_avail"] == pytest.approx(0.75, abs=0.02)
        assert by_n[40]["mean_daily_min_avail"] >= 0.55
        assert by_n[50]["mean_daily_min_avail"] >= 0.55

    def test_daily_minimum_mostly_monotone_in_fleet_size(self):
        sizes = [1, 2, 5, 10, 20, 40, 60, 80, 100]
        rows = min_availability_experiment(sizes, n_days=300, seed=2)
        mins = [r["mean_daily_min_avail"] for r in rows]
        non_decreasing = sum(1 for a, b in zip(mins, mins[1:]) if b >= a)
        assert non_decreasing / (len(mins) - 1) >= 0.95

    def test_too_few_days_rejected(self):
        with pytest.raises(ValueError, match="stable statistics"):
            min_availability_experiment([5], n_days=10, seed=0)


class TestDrivingDraw:
    def test_individual_total(self):
        fleet = FleetConfig(n_ev=1, seed=5)
        schedule = sample_trips(seed=5, n_days=DAYS_PER_YEAR, trips_per_day=3, vehicle_id=0)
        draw = driving_draw(fleet, "individual", schedule)
        assert draw.values[:24].sum() == pytest.approx(3 * 1.1)
        assert draw.values.sum() == pytest.approx(3 * 1.1 * DAYS_PER_YEAR)

    def test_pooled_spread(self):
        fleet = FleetConfig(n_ev=50)
        draw = driving_draw(fleet, "pooled")
        assert draw.values[:24].sum() == pytest.approx(165.0)
        assert draw.values[DAYTIME_START] == pytest.approx(13.75)
        assert draw.values[0] == 0.0
        assert draw.values.sum() == pytest.approx(50 * 3 * 1.1 * DAYS_PER_YEAR)

    def test_disabled_driving_is_zero(self):
        fleet = FleetConfig(n_ev=50, driving_enabled=False)
        assert driving_draw(fleet, "pooled").values.sum() == 0.0


class TestFleetConfig:
    def test_usable_capacity(self):
        fleet = FleetConfig(n_ev=50, battery_kwh_per_ev=40.0, v2h_fraction=0.5)
        assert fleet.fleet_battery_kwh == 2000.0
        assert fleet.v2h_usable_kwh == 1000.0

    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            FleetConfig(v2h_fraction=1.5)
        with pytest.raises(ValueError):
            FleetConfig(daytime_availability=-0.1)
