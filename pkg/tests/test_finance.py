"""Tests for cost trajectories and discounted cash-flow metrics."""

import math

import numpy as np
import pytest

from pvdistrict.dispatch import DispatchResult, Tariff
from pvdistrict.finance import (
    COMPONENT_BATTERY,
    COMPONENT_EV_ADD,
    COMPONENT_PV,
    TECH_PV_EV,
    FinanceParams,
    FinancialSummary,
    TechnologyCostSchedule,
    TransportParams,
    annual_electricity_cost,
    annuity_factor,
    cost_at_year,
    irr,
    npv_electricity,
    npv_gasoline,
    spb,
    system_cost,
)


SCHEDULE = TechnologyCostSchedule()
PARAMS = FinanceParams()


def _dispatch(e_import=0.0, e_export=0.0):
    return DispatchResult(
        e_import=e_import, e_export=e_export, e_pv=0.0, e_pv_to_load=0.0,
        e_batt_to_load=0.0, e_pv_to_batt=0.0, e_grid_to_batt=0.0,
        e_driving=0.0, e_losses=0.0, e_load=e_import, soc_start=0.0, soc_end=0.0,
    )


class TestCostTrajectories:
    def test_pv_2030(self):
        # 2.2 $/W falling at 0.925/yr reaches about 1.01 $/W by 2030.
        usd_per_w = cost_at_year(SCHEDULE, COMPONENT_PV, 2030) / 1000.0
        assert usd_per_w == pytest.approx(1.01, abs=0.005)

    def test_battery_2030(self):
        assert cost_at_year(SCHEDULE, COMPONENT_BATTERY, 2030) == pytest.approx(636.0, abs=1.0)

    def test_ev_add_2030_and_2040(self):
        assert cost_at_year(SCHEDULE, COMPONENT_EV_ADD, 2030) == pytest.approx(24.3, abs=1.0)
        assert cost_at_year(SCHEDULE, COMPONENT_EV_ADD, 2040) == pytest.approx(3.0, abs=0.5)

    def test_base_year_exact_and_log_linear(self):
        assert cost_at_year(SCHEDULE, COMPONENT_PV, 2020) == SCHEDULE.pv_cost_0
        logs = [math.log(cost_at_year(SCHEDULE, COMPONENT_PV, y)) for y in range(2020, 2031)]
        steps = np.diff(logs)
        assert np.allclose(steps, math.log(0.925))

    def test_year_before_base_rejected(self):
        with pytest.raises(ValueError, match="precedes"):
            cost_at_year(SCHEDULE, COMPONENT_PV, 2019)


class TestSystemCost:
    def test_zero_system(self):
        assert system_cost(0.0, 0.0, 2030, SCHEDULE) == 0.0

    def test_pv_only_2030(self):
        assert system_cost(10.0, 0.0, 2030, SCHEDULE) == pytest.approx(10_100.0, rel=5e-3)

    def test_ev_vehicle_premium(self):
        # 20 kWh usable of a 40 kWh vehicle at 200 $/kWh of full battery:
        # $8,000 per vehicle at the base-year price.
        cost = system_cost(0.0, 20.0, 2020, SCHEDULE, technology=TECH_PV_EV, v2h_fraction=0.5)
        assert cost == pytest.approx(8000.0)

    def test_stationary_battery(self):
        assert system_cost(0.0, 5.0, 2020, SCHEDULE) == pytest.approx(5 * 1182.0)


class TestAnnualElectricityCost:
    def test_baseline_import_bill(self):
        cost = annual_electricity_cost(
            _dispatch(e_import=5915.0), Tariff(0.22, 0.09), 0.0, 0.0, SCHEDULE, 2020
        )
        assert cost == pytest.approx(1301.30)

    def test_export_credit(self):
        cost = annual_electricity_cost(
            _dispatch(e_export=1000.0), Tariff(0.22, 0.09), 0.0, 0.0, SCHEDULE, 2020
        )
        assert cost == pytest.approx(-90.0)

    def test_replacement_charge(self):
        # R_battery(2032) from the battery trajectory is ~562 $/kWh; a 20 kWh
        # pack replacement books ~$11,240 in that year only.
        base = annual_electricity_cost(
            _dispatch(), Tariff(0.22, 0.09), 0.0, 20.0, SCHEDULE, 2032,
            replacement_this_year=False, start_year=2020,
        )
        with_repl = annual_electricity_cost(
            _dispatch(), Tariff(0.22, 0.09), 0.0, 20.0, SCHEDULE, 2032,
            replacement_this_year=True, start_year=2020,
        )
        expected = 20.0 * cost_at_year(SCHEDULE, COMPONENT_BATTERY, 2032)
        assert with_repl - base == pytest.approx(expected)
        assert with_repl - base == pytest.approx(11_240.0, rel=2e-3)

    def test_pv_maintenance_frozen_at_start_year(self):
        cost = annual_electricity_cost(
            _dispatch(), Tariff(0.22, 0.09), 10.0, 0.0, SCHEDULE, 2035, start_year=2020
        )
        assert cost == pytest.approx(10.0 * 0.01 * 2200.0)


class TestNpv:
    def test_identical_flows_zero(self):
        base = [100.0] * 25
        assert npv_electricity(base, list(base), 0.0, PARAMS) == pytest.approx(0.0)

    def test_single_year_discounting(self):
        params = FinanceParams(project_years=1)
        value = npv_electricity([100.0], [0.0], 97.0874, params)
        assert value == pytest.approx(0.0, abs=1e-3)

    def test_annuity_against_direct_summation(self):
        direct = sum(652.0 / 1.03**n for n in range(1, 26))
        assert 652.0 * annuity_factor(PARAMS) == pytest.approx(direct, rel=1e-12)
        assert direct == pytest.approx(11_353.0, abs=5.0)

    def test_zero_rate_equals_plain_sum(self):
        params = FinanceParams(discount_rate=0.0)
        base = list(np.linspace(50, 80, 25))
        system = list(np.linspace(10, 30, 25))
        value = npv_electricity(base, system, 123.0, params)
        assert value == pytest.approx(sum(b - s for b, s in zip(base, system)) - 123.0)

    def test_decreasing_in_discount_rate(self):
        base = [100.0] * 25
        system = [20.0] * 25
        values = [
            npv_electricity(base, system, 500.0, FinanceParams(discount_rate=r))
            for r in (0.0, 0.03, 0.06, 0.1)
        ]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestNpvGasoline:
    def test_annual_gasoline_cost(self):
        transport = TransportParams(n_vehicles=1)
        assert transport.annual_gasoline_cost() == pytest.approx(652.0, abs=0.5)

    def test_zero_vehicles(self):
        transport = TransportParams(n_vehicles=0)
        assert npv_gasoline(transport, PARAMS) == 0.0

    def test_fifty_vehicle_fleet(self):
        transport = TransportParams(n_vehicles=50)
        direct = sum(50 * 6368.0 / 12.6 * 1.29 / 1.03**n for n in range(1, 26))
        value = npv_gasoline(transport, PARAMS)
        assert value == pytest.approx(direct, rel=1e-12)
        assert value == pytest.approx(567_700.0, rel=2e-3)


class TestIrr:
    def test_single_period(self):
        assert irr([110.0], 100.0) == pytest.approx(0.10, abs=1e-4)

    def test_cubic_against_fine_bisection(self):
        flows = [50.0, 50.0, 50.0]

        def npv_at(d):
            return -100.0 + sum(f / (1 + d) ** n for n, f in enumerate(flows, 1))

        lo, hi = 0.0, 1.0
        while hi - lo > 1e-9:
            mid = 0.5 * (lo + hi)
            if npv_at(mid) > 0:
                lo = mid
            else:
                hi = mid
        oracle = 0.5 * (lo + hi)
        assert oracle == pytest.approx(0.2338, abs=1e-3)
        assert irr(flows, 100.0) == pytest.approx(oracle, abs=1e-5)

    def test_all_negative_flows_none(self):
        assert irr([-10.0, -5.0], 100.0) is None

    def test_npv_at_irr_is_zero(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            capex = float(rng.uniform(50, 500))
            flows = list(rng.uniform(5, 80, int(rng.integers(3, 30))))
            rate = irr(flows, capex)
            if rate is None:
                continue
            residual = -capex + sum(f / (1 + rate) ** n for n, f in enumerate(flows, 1))
            assert abs(residual) < 1e-6 * capex


class TestSpb:
    def test_exact_repayment(self):
        assert spb([50.0] * 10, 100.0) == pytest.approx(2.0)

    def test_interpolated_repayment(self):
        assert spb([30.0] * 10, 100.0) == pytest.approx(10.0 / 3.0)

    def test_never_repaid(self):
        assert spb([0.0] * 10, 100.0) is None


class TestFinancialSummary:
    def test_npv_components_must_sum(self):
        with pytest.raises(ValueError, match="npv_total"):
            FinancialSummary(
                npv_total=10.0, npv_electricity=3.0, npv_gasoline=3.0,
                irr=None, spb_years=None, capex=1.0, cashflows=(),
            )

    def test_valid_summary(self):
        summary = FinancialSummary(
            npv_total=6.0, npv_electricity=3.0, npv_gasoline=3.0,
            irr=0.05, spb_years=4.0, capex=1.0, cashflows=(1.0, 2.0),
        )
        assert summary.npv_total == 6.0
