import random

import pytest

from gridauction.loads import (
    ConsumerDemand,
    LoadVector,
    TimeGrid,
    aggregate,
    par,
    read_demands_csv,
    read_load_rows,
    total_load,
    write_demands_csv,
)


def example_peak_vector() -> LoadVector:
    # 24 slots: slot 19 carries 5 kWh, slots 18 and 20 carry 2 kWh, rest 1 kWh
    values = [1.0] * 24
    values[17] = 2.0
    values[18] = 5.0
    values[19] = 2.0
    return LoadVector(tuple(values))


def test_time_grid_rejects_tiny_grids():
    TimeGrid(2)
    with pytest.raises(ValueError):
        TimeGrid(1)


def test_load_vector_rejects_negative_entries():
    with pytest.raises(ValueError, match="slot 2"):
        LoadVector((1.0, -0.5))


def test_total_load():
    assert total_load(LoadVector((0.0, 0.0, 0.0))) == 0.0
    assert total_load(example_peak_vector()) == 30.0
    assert total_load(LoadVector((4.0, 0.0))) == 4.0


def test_aggregate_componentwise():
    demands = [
        ConsumerDemand(1, LoadVector((1.0, 2.0))),
        ConsumerDemand(2, LoadVector((3.0, 4.0))),
    ]
    assert aggregate(demands).values == (4.0, 6.0)


def test_aggregate_empty_population():
    assert aggregate([], slot_count=3).values == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        aggregate([])


def test_aggregate_scales_with_count():
    demands = [ConsumerDemand(i, LoadVector((1.0, 1.0))) for i in range(10)]
    assert aggregate(demands).values == (10.0, 10.0)


def test_aggregate_rejects_mismatched_grids():
    demands = [
        ConsumerDemand(1, LoadVector((1.0, 2.0))),
        ConsumerDemand(2, LoadVector((1.0, 2.0, 3.0))),
    ]
    with pytest.raises(ValueError, match="consumer 2"):
        aggregate(demands)


def test_par_flat_load_is_one():
    assert par(LoadVector((2.5,) * 6)) == pytest.approx(1.0, abs=1e-12)


def test_par_worked_example():
    assert par(example_peak_vector()) == pytest.approx(4.0, abs=1e-12)


def test_par_two_slots():
    # 2 slots * peak 4 / total 4
    assert par(LoadVector((4.0, 0.0))) == pytest.approx(2.0, abs=1e-12)


def test_par_undefined_for_zero_vector():
    with pytest.raises(ValueError, match="undefined"):
        par(LoadVector((0.0, 0.0)))


def test_par_at_least_one_and_scale_invariant():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 24)
        values = tuple(rng.uniform(0.0, 10.0) for _ in range(n))
        if sum(values) <= 0:
            continue
        v = LoadVector(values)
        ratio = par(v)
        assert ratio >= 1.0 - 1e-12
        scale = rng.uniform(0.1, 50.0)
        scaled = LoadVector(tuple(scale * x for x in values))
        assert par(scaled) == pytest.approx(ratio, rel=1e-12)
    # equality holds exactly for constant vectors only
    assert par(LoadVector((3.0, 3.0, 3.0))) == pytest.approx(1.0, abs=1e-12)
    assert par(LoadVector((3.0, 3.0, 3.1))) > 1.0


def test_aggregate_order_independent():
    rng = random.Random(11)
    demands = [
        ConsumerDemand(i, LoadVector(tuple(rng.uniform(0.1, 2.0) for _ in range(6))))
        for i in range(8)
    ]
    shuffled = demands[:]
    rng.shuffle(shuffled)
    forward = aggregate(demands)
    assert all(
        a == pytest.approx(b, abs=1e-12)
        for a, b in zip(forward.values, aggregate(shuffled).values)
    )
    # associativity: aggregating partial aggregates gives the same totals
    left = aggregate(demands[:3])
    right = aggregate(demands[3:])
    combined = tuple(a + b for a, b in zip(left.values, right.values))
    assert all(a == pytest.approx(b, abs=1e-12) for a, b in zip(forward.values, combined))


def test_consumer_demand_requires_positive_total():
    with pytest.raises(ValueError):
        ConsumerDemand(1, LoadVector((0.0, 0.0)))


def test_demands_csv_roundtrip(tmp_path):
    demands = [
        ConsumerDemand(0, LoadVector((0.25, 1.0 / 3.0, 2.0))),
        ConsumerDemand(1, LoadVector((1.5, 0.1, 0.7))),
    ]
    path = tmp_path / "demands.csv"
    write_demands_csv(path, demands)
    back = read_demands_csv(path)
    assert [d.consumer_id for d in back] == [0, 1]
    for orig, copy in zip(demands, back):
        assert orig.demand.values == copy.demand.values  # repr round-trips exactly


def test_read_load_rows_without_id(tmp_path):
    path = tmp_path / "load.csv"
    path.write_text("slot_1,slot_2,slot_3\n1.0,2.0,3.5\n")
    rows = read_load_rows(path)
    assert rows == [(None, LoadVector((1.0, 2.0, 3.5)))]


def test_read_load_rows_rejects_bad_header(tmp_path):
    path = tmp_path / "load.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="slot_1"):
        read_load_rows(path)
