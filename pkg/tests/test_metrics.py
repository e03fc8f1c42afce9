"""Tests for energy indices, cost saving, and CO2 accounting."""

import pytest

from pvdistrict.dispatch import DispatchResult
from pvdistrict.finance import FinancialSummary, TransportParams
from pvdistrict.metrics import EmissionFactors, co2, cost_saving, energy_indices


def _dispatch(e_pv=0.0, e_pv_to_load=0.0, e_batt_to_load=0.0, e_load=1.0, e_import=0.0):
    return DispatchResult(
        e_import=e_import, e_export=0.0, e_pv=e_pv, e_pv_to_load=e_pv_to_load,
        e_batt_to_load=e_batt_to_load, e_pv_to_batt=0.0, e_grid_to_batt=0.0,
        e_driving=0.0, e_losses=0.0, e_load=e_load, soc_start=0.0, soc_end=0.0,
    )


def _summary(npv_total):
    return FinancialSummary(
        npv_total=npv_total, npv_electricity=npv_total, npv_gasoline=0.0,
        irr=None, spb_years=None, capex=0.0, cashflows=(),
    )


class TestEnergyIndices:
    def test_formula_arithmetic(self):
        es, ss, sc = energy_indices(
            _dispatch(e_pv=100.0, e_pv_to_load=30.0, e_batt_to_load=20.0, e_load=80.0)
        )
        assert sc == pytest.approx(50.0)
        assert ss == pytest.approx(62.5)
        assert es == pytest.approx(125.0)

    def test_pv_always_below_load(self):
        es, ss, sc = energy_indices(
            _dispatch(e_pv=40.0, e_pv_to_load=40.0, e_load=100.0)
        )
        assert sc == pytest.approx(100.0)
        assert ss == pytest.approx(es)

    def test_es_anchor_at_calibrated_cf(self):
        # 10 kW at CF 0.135 on the 5,915 kWh fixture load.
        e_pv = 10.0 * 8760 * 0.135
        es, _, _ = energy_indices(_dispatch(e_pv=e_pv, e_load=5915.0))
        assert es == pytest.approx(200.0, abs=2.0)

    def test_no_pv_convention(self):
        _, _, sc = energy_indices(_dispatch(e_pv=0.0, e_load=10.0))
        assert sc == 100.0

    def test_identity_sc_epv_equals_ss_eload(self):
        dispatch = _dispatch(e_pv=123.4, e_pv_to_load=50.0, e_batt_to_load=10.0, e_load=90.0)
        es, ss, sc = energy_indices(dispatch)
        assert sc * dispatch.e_pv == pytest.approx(ss * dispatch.e_load)

    def test_ss_bounded_on_simulated_dispatches(self):
        # Served load can never exceed the load itself, so SS stays in [0, 100]
        # whatever the system size.
        import numpy as np

        from pvdistrict.dispatch import StorageConfig, simulate_year

        rng = np.random.default_rng(55)
        for _ in range(20):
            n = 24 * int(rng.integers(2, 30))
            demand = rng.uniform(0.01, 2.0, n)
            pv = rng.uniform(0, 5.0, n)
            storage = StorageConfig(
                kind="stationary", nominal_kwh=float(rng.uniform(0, 30.0))
            )
            _, ss, sc = energy_indices(simulate_year(demand, pv, storage))
            assert 0.0 <= ss <= 100.0 + 1e-9  # headroom for float accumulation
            assert 0.0 <= sc <= 100.0 + 1e-9

    def test_zero_load_rejected(self):
        with pytest.raises(ValueError, match="load"):
            energy_indices(_dispatch(e_load=0.0))


class TestCostSaving:
    def test_zero_npv_zero_saving(self):
        assert cost_saving(_summary(0.0), 1000.0, 25) == 0.0

    def test_table_anchor(self):
        # $14,826 over 25 years against a $1,953/yr baseline lands near 30%.
        cs = cost_saving(_summary(14_826.0), 1301.3 + 652.0, 25)
        assert cs == pytest.approx(30.0, abs=0.5)

    def test_linear_in_npv(self):
        base = cost_saving(_summary(5000.0), 2000.0, 25)
        assert cost_saving(_summary(10_000.0), 2000.0, 25) == pytest.approx(2 * base)

    def test_invariant_under_currency_rescale(self):
        a = cost_saving(_summary(5000.0), 2000.0, 25)
        b = cost_saving(_summary(5000.0 * 110), 2000.0 * 110, 25)
        assert a == pytest.approx(b)

    def test_zero_base_rejected(self):
        with pytest.raises(ValueError, match="baseline"):
            cost_saving(_summary(1.0), 0.0, 25)


class TestCo2:
    FACTORS = EmissionFactors(grid_kg_per_kwh=0.522, gasoline_kg_per_l=2.3)

    def test_shinchi_household_baseline(self):
        # 5,915 kWh of grid power plus one ICE vehicle's gasoline burn.
        transport = TransportParams(n_vehicles=1)
        emi_base, _, _ = co2(
            _dispatch(e_import=5915.0, e_load=5915.0),
            _dispatch(e_import=5915.0, e_load=5915.0),
            self.FACTORS, transport, include_gasoline=True,
        )
        assert emi_base == pytest.approx(4250.0, abs=5.0)

    def test_no_change_no_reduction(self):
        base = _dispatch(e_import=1000.0, e_load=1000.0)
        _, _, reduction = co2(base, base, self.FACTORS)
        assert reduction == pytest.approx(0.0)

    def test_ev_scenario_reduction(self):
        transport = TransportParams(n_vehicles=1)
        emi_base, emi_system, reduction = co2(
            _dispatch(e_import=5915.0, e_load=5915.0),
            _dispatch(e_import=500.0, e_load=5915.0),
            self.FACTORS, transport, include_gasoline=True,
        )
        assert emi_system == pytest.approx(261.0, abs=1.0)
        assert reduction == pytest.approx(93.9, abs=0.3)

    def test_full_reduction_iff_zero_imports(self):
        transport = TransportParams(n_vehicles=1)
        _, _, reduction = co2(
            _dispatch(e_import=5915.0, e_load=5915.0),
            _dispatch(e_import=0.0, e_load=5915.0),
            self.FACTORS, transport, include_gasoline=True,
        )
        assert reduction == pytest.approx(100.0)

    def test_kyoto_grid_factor(self):
        factors = EmissionFactors(grid_kg_per_kwh=0.352)
        emi_base, _, _ = co2(
            _dispatch(e_import=1000.0, e_load=1000.0),
            _dispatch(e_import=1000.0, e_load=1000.0),
            factors,
        )
        assert emi_base == pytest.approx(352.0)
