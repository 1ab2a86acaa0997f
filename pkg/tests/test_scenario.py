import json

import pytest

from gridauction.loads import aggregate, par, write_demands_csv
from gridauction.scenario import (
    ConfigError,
    DemandProfile,
    ScenarioConfig,
    config_from_dict,
    generate_demands,
    load_config,
    sample_alphas,
)


def test_default_config_is_valid():
    cfg = ScenarioConfig()
    assert cfg.population == 100
    assert cfg.cut_percentages == (0.1, 0.2, 0.3, 0.4, 0.5)
    assert cfg.cost_model().form == "experiment"


def test_config_from_dict_roundtrip():
    raw = {
        "population": 40,
        "trials": 3,
        "seed": 9,
        "cut_percentages": [0.2, 0.4],
        "valuation": {"distribution": "uniform"},
        "cost": {"form": "experiment", "q1": 10, "q2": 5},
        "demand": {"base_range": [0.1, 0.4], "evening_wing_fraction": 0.3},
        "output_dir": "results",
    }
    cfg = config_from_dict(raw)
    assert cfg.population == 40
    assert cfg.valuation_kind == "uniform"
    assert cfg.cost_model().q1 == 10.0
    assert cfg.demand.base_range == (0.1, 0.4)
    assert cfg.output_dir == "results"


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError, match="populaton"):
        config_from_dict({"populaton": 10})
    with pytest.raises(ConfigError, match="cost"):
        config_from_dict({"cost": {"form": "experiment", "qq1": 1}})
    with pytest.raises(ConfigError, match="demand"):
        config_from_dict({"demand": {"evening_sots": [18, 21]}})
    with pytest.raises(ConfigError, match="valuation"):
        config_from_dict({"valuation": {"kind": "us"}})


def test_invalid_values_are_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"population": 0})
    with pytest.raises(ConfigError):
        config_from_dict({"cut_percentages": [0.0]})
    with pytest.raises(ConfigError):
        config_from_dict({"cut_percentages": []})
    with pytest.raises(ConfigError):
        config_from_dict({"valuation": {"distribution": "lognormal"}})
    with pytest.raises(ConfigError):
        config_from_dict({"cost": {"form": "quadratic"}})  # missing c1
    with pytest.raises(ConfigError):
        config_from_dict({"guarantee_kwh": -0.5})


def test_quadratic_cost_config():
    cfg = config_from_dict({"cost": {"form": "quadratic", "c1": 2.0, "c2": 1.0}})
    model = cfg.cost_model()
    assert model.form == "quadratic"
    assert (model.c1, model.c2, model.c3) == (2.0, 1.0, 0.0)


def test_load_config_json(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"population": 25, "trials": 2}))
    cfg = load_config(path)
    assert cfg.population == 25
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_generator_deterministic():
    cfg = ScenarioConfig(population=30)
    first = generate_demands(cfg, cfg.trial_rng(0))
    second = generate_demands(cfg, cfg.trial_rng(0))
    assert [d.demand.values for d in first] == [d.demand.values for d in second]
    third = generate_demands(cfg, cfg.trial_rng(1))
    assert [d.demand.values for d in first] != [d.demand.values for d in third]


def test_generator_positive_demand_everywhere():
    cfg = ScenarioConfig(population=50)
    for d in generate_demands(cfg, cfg.trial_rng(3)):
        assert min(d.demand.values) > 0.0


def test_generator_aggregate_par_in_band():
    """Default profile calibration: one dominant evening peak, PAR 1.5-2.5."""
    cfg = ScenarioConfig(population=10000)
    demands = generate_demands(cfg, cfg.trial_rng(0))
    total = aggregate(demands, cfg.slot_count)
    ratio = par(total)
    assert 1.5 <= ratio <= 2.5
    peak_slot = max(range(24), key=lambda i: total[i])
    assert peak_slot + 1 in (18, 19, 20, 21)


def test_desk_scale_par_supports_half_cut():
    # every desk trial seed must keep a 50% cut feasible (PAR above 2)
    cfg = ScenarioConfig(population=100)
    for trial in range(10):
        total = aggregate(generate_demands(cfg, cfg.trial_rng(trial)), 24)
        assert par(total) > 2.0


def test_sample_alphas_deterministic():
    cfg = ScenarioConfig(population=100, valuation_kind="uniform")
    rng_a = cfg.trial_rng(5)
    rng_b = cfg.trial_rng(5)
    generate_demands(cfg, rng_a)
    generate_demands(cfg, rng_b)
    assert sample_alphas(cfg, rng_a) == sample_alphas(cfg, rng_b)


def test_demands_csv_override(tmp_path):
    small_grid = DemandProfile(
        morning_slots=(2, 3), evening_slots=(4, 5), peak_slot_weights=(0.6, 0.4)
    )
    cfg = ScenarioConfig(population=5, slot_count=6, demand=small_grid)
    demands = generate_demands(cfg, cfg.trial_rng(0))
    path = tmp_path / "demands.csv"
    write_demands_csv(path, demands)

    override = ScenarioConfig(
        population=5, slot_count=6, demand=DemandProfile(demands_csv=str(path))
    )
    loaded = generate_demands(override, override.trial_rng(0))
    assert [d.demand.values for d in loaded] == [d.demand.values for d in demands]

    mismatch = ScenarioConfig(
        population=7, slot_count=6, demand=DemandProfile(demands_csv=str(path))
    )
    with pytest.raises(ConfigError, match="population"):
        generate_demands(mismatch, mismatch.trial_rng(0))


def test_profile_validation():
    with pytest.raises(ConfigError):
        DemandProfile(base_range=(0.0, 0.5))
    with pytest.raises(ConfigError):
        DemandProfile(peak_slot_weights=(0.5, 0.5))  # must cover 4 evening slots
    with pytest.raises(ConfigError):
        DemandProfile(evening_wing_fraction=1.5)
