"""Tests for the synthetic demand and capacity-factor generators."""

import numpy as np
import pytest

from pvdistrict.fixtures import (
    calibrated_demand_profile,
    synth_cf,
    synth_commercial_demand,
    synth_residential_demand,
    write_cf_csv,
    write_demand_csv,
)
from pvdistrict.profiles import aggregate, load_cf_csv, load_demand_csv, profile_stats


class TestResidential:
    def test_mean_annual_total_on_target(self):
        houses = synth_residential_demand(50, seed=42)
        totals = [p.values.sum() for p in houses]
        assert np.mean(totals) == pytest.approx(5915.0, rel=0.02)
        assert len(houses) == 50
        assert all(p.is_gap_free() for p in houses)

    def test_winter_heavier_than_summer(self):
        district = aggregate(synth_residential_demand(20, seed=3))
        daily = district.values.reshape(365, 24).sum(axis=1)
        winter = np.r_[daily[:59], daily[334:]].mean()
        summer = daily[152:243].mean()
        assert winter > 1.2 * summer

    def test_morning_and_evening_peaks(self):
        district = aggregate(synth_residential_demand(20, seed=3))
        by_hour = district.values.reshape(365, 24).mean(axis=0)
        assert by_hour[7] > by_hour[12]
        assert by_hour[19] > by_hour[12]

    def test_seeded_and_distinct(self):
        a = synth_residential_demand(3, seed=1)
        b = synth_residential_demand(3, seed=1)
        c = synth_residential_demand(3, seed=2)
        for x, y in zip(a, b):
            assert np.array_equal(x.values, y.values)
        assert not np.array_equal(a[0].values, c[0].values)


class TestCommercial:
    def test_daytime_plateau(self):
        district = aggregate(synth_commercial_demand(30, seed=5))
        by_hour = district.values.reshape(365, 24).mean(axis=0)
        assert by_hour[14] / by_hour[3] > 3.0

    def test_mean_total(self):
        buildings = synth_commercial_demand(30, seed=5)
        totals = [p.values.sum() for p in buildings]
        assert np.mean(totals) == pytest.approx(25_600.0, rel=0.02)


class TestCapacityFactor:
    def test_calibrated_mean(self):
        cf = synth_cf(seed=11, target_annual_cf=0.135)
        assert cf.values.mean() == pytest.approx(0.135, abs=1e-4)
        assert cf.values.max() <= 1.0
        assert cf.values.min() >= 0.0

    def test_daylight_support(self):
        cf = synth_cf(seed=11)
        by_hour = cf.values.reshape(365, 24).mean(axis=0)
        assert by_hour[0] == 0.0
        assert by_hour[12] > 0.3


class TestCalibratedProfile:
    def test_exact_target_statistics(self):
        # Annual total 5,915 kWh with hourly extremes 12.3 / 0.05 kW.
        stats = profile_stats(calibrated_demand_profile())
        assert stats.annual_total_kwh == pytest.approx(5915.0, abs=1e-3)
        assert stats.hourly_max_kw == pytest.approx(12.3)
        assert stats.hourly_min_kw == pytest.approx(0.05)
        assert stats.n_missing == 0

    def test_other_targets_supported(self):
        stats = profile_stats(
            calibrated_demand_profile(annual_total_kwh=13_894.0, hourly_max_kw=12.3,
                                      hourly_min_kw=0.05, seed=4)
        )
        assert stats.annual_total_kwh == pytest.approx(13_894.0, abs=1e-3)

    def test_impossible_targets_rejected(self):
        with pytest.raises(ValueError, match="incompatible"):
            calibrated_demand_profile(annual_total_kwh=1.0, hourly_max_kw=12.3,
                                      hourly_min_kw=0.05)


class TestCsvWriters:
    def test_demand_roundtrip_and_determinism(self, tmp_path):
        houses = {f"H{i}": p for i, p in enumerate(synth_residential_demand(2, seed=8))}
        path_a = tmp_path / "a.csv"
        path_b = tmp_path / "b.csv"
        write_demand_csv(path_a, houses)
        write_demand_csv(path_b, houses)
        assert path_a.read_bytes() == path_b.read_bytes()
        loaded = load_demand_csv(path_a)
        for name, profile in houses.items():
            assert np.allclose(loaded[name].values, profile.values, atol=1e-6)

    def test_cf_roundtrip(self, tmp_path):
        cf = synth_cf(seed=8)
        path = tmp_path / "cf.csv"
        write_cf_csv(path, cf)
        loaded = load_cf_csv(path)
        assert np.allclose(loaded.values, cf.values, atol=1e-6)
