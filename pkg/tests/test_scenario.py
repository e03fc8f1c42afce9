"""Tests for strict scenario parsing and round-tripping."""

import dataclasses

import pytest
import yaml

from pvdistrict.scenario import (
    ScenarioConfigError,
    emit_scenario,
    parse_scenario,
    scenario_from_dict,
)


def _write(tmp_path, data):
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


class TestDefaults:
    def test_minimal_config_gets_documented_defaults(self):
        config = scenario_from_dict({"name": "minimal"})
        assert config.finance.discount_rate == 0.03
        assert config.finance.project_years == 25
        assert config.storage.charge_efficiency == 0.95
        assert config.storage.discharge_efficiency == 0.95
        assert config.pv.annual_degradation == 0.005
        assert config.tariff.import_price == 0.22
        assert config.fleet.n_ev == config.district.n_houses
        assert "finance.discount_rate" in config.applied_defaults
        assert config.applied_defaults["finance.discount_rate"] == 0.03

    def test_empty_file_parses(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        config = parse_scenario(path)
        assert config.name == "scenario"


class TestValidation:
    def test_negative_import_price_names_key(self):
        with pytest.raises(ScenarioConfigError, match="tariff.import_price"):
            scenario_from_dict({"tariff": {"import_price": -1}})

    def test_unknown_top_level_key(self):
        with pytest.raises(ScenarioConfigError, match="unknown key 'tarrif'"):
            scenario_from_dict({"tarrif": {}})

    def test_unknown_nested_key_has_path(self):
        with pytest.raises(ScenarioConfigError, match="fleet.n_evs"):
            scenario_from_dict({"technology": "pv_plus_ev", "fleet": {"n_evs": 3}})

    def test_bad_technology(self):
        with pytest.raises(ScenarioConfigError, match="technology"):
            scenario_from_dict({"technology": "pv_plus_flywheel"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioConfigError, match="not found"):
            parse_scenario(tmp_path / "absent.yaml")

    def test_type_errors_are_caught(self):
        with pytest.raises(ScenarioConfigError, match="seed"):
            scenario_from_dict({"seed": "forty-two"})
        with pytest.raises(ScenarioConfigError, match="fit"):
            scenario_from_dict({"fit": "yes please"})


class TestFleetPrecedence:
    def test_battery_tech_with_fleet_warns_and_ignores(self):
        with pytest.warns(UserWarning, match="fleet section is ignored"):
            config = scenario_from_dict({
                "technology": "pv_plus_battery",
                "district": {"n_houses": 4},
                "fleet": {"n_ev": 99, "v2h_fraction": 0.9},
            })
        assert config.fleet.n_ev == 4
        assert config.fleet.v2h_fraction == 0.5

    def test_ev_tech_keeps_fleet(self):
        config = scenario_from_dict({
            "technology": "pv_plus_ev",
            "fleet": {"n_ev": 99},
        })
        assert config.fleet.n_ev == 99


class TestRoundTrip:
    @pytest.mark.parametrize("technology", ["pv_plus_ev", "pv_plus_battery"])
    def test_parse_emit_parse_identity(self, technology, tmp_path):
        config = scenario_from_dict({
            "name": "roundtrip",
            "seed": 9,
            "technology": technology,
            "fit": False,
            "mode": "individual",
            "district": {"n_houses": 7, "max_pv_kw_per_house": 8.0},
            "tariff": {"import_price": 0.18, "export_price": 0.08},
            "emissions": {"grid_kg_per_kwh": 0.352},
        })
        path = tmp_path / "emitted.yaml"
        path.write_text(emit_scenario(config), encoding="utf-8")
        reparsed = parse_scenario(path)
        assert reparsed == config
        # Battery configs omit the (ignored) fleet section, whose defaults
        # then re-apply on the second parse; everything else is fully pinned.
        non_fleet = {k: v for k, v in reparsed.applied_defaults.items()
                     if not k.startswith("fleet.")}
        assert non_fleet == {}

    def test_seed_override_pattern(self):
        config = scenario_from_dict({"seed": 1, "technology": "pv_plus_ev"})
        overridden = dataclasses.replace(
            config, seed=5, fleet=dataclasses.replace(config.fleet, seed=5)
        )
        assert overridden.seed == 5
        assert overridden.fleet.seed == 5
