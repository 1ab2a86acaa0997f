import random
from collections import Counter

import pytest

from gridauction.agents import (
    US_DISTRIBUTION,
    UNIFORM_DISTRIBUTION,
    AgentState,
    sample_alpha,
    valuation_distribution,
)
from gridauction.auction import BidIntent
from gridauction.loads import LoadVector


def test_distribution_lookup():
    assert valuation_distribution("us") is US_DISTRIBUTION
    assert valuation_distribution("uniform") is UNIFORM_DISTRIBUTION
    with pytest.raises(ValueError):
        valuation_distribution("normal")


def test_distribution_validation():
    from gridauction.agents import ValuationDistribution

    with pytest.raises(ValueError):
        ValuationDistribution("bad", (1.0, 1.5), (0.5, 0.6))
    with pytest.raises(ValueError):
        ValuationDistribution("bad", (1.0, 1.5), (0.5,))


def test_us_sampling_frequencies():
    rng = random.Random(1)
    counts = Counter(sample_alpha(US_DISTRIBUTION, rng) for _ in range(100_000))
    expected = dict(zip(US_DISTRIBUTION.values, US_DISTRIBUTION.weights))
    for value, weight in expected.items():
        assert counts[value] / 100_000 == pytest.approx(weight, abs=0.01)


def test_uniform_sampling_frequencies():
    rng = random.Random(2)
    counts = Counter(sample_alpha(UNIFORM_DISTRIBUTION, rng) for _ in range(100_000))
    for value in UNIFORM_DISTRIBUTION.values:
        assert counts[value] / 100_000 == pytest.approx(0.1, abs=0.01)


def test_sampling_deterministic():
    a = [sample_alpha(US_DISTRIBUTION, random.Random(33)) for _ in range(100)]
    b = [sample_alpha(US_DISTRIBUTION, random.Random(33)) for _ in range(100)]
    assert a == b


def demand_24(**overrides):
    values = [0.0] * 24
    for slot, v in overrides.items():
        values[int(slot) - 1] = v
    return LoadVector(tuple(values))


def test_bid_on_own_slot_when_supply_covers():
    agent = AgentState(1, demand_24(**{"19": 2.0}), alpha=1.5)
    remaining = [0.0] * 24
    remaining[18] = 5.0
    reserves = [0.1] * 24
    reserves[18] = 0.2
    intents = agent.make_bids(remaining, reserves)
    assert intents == [
        BidIntent(slot=18, quantity=2.0, valuation=1.5 * 0.2, origins=((18, 2.0),))
    ]


def test_shift_prefers_later_slot_on_distance_tie():
    agent = AgentState(1, demand_24(**{"19": 2.0}), alpha=1.2)
    remaining = [0.0] * 24
    remaining[17] = 3.0  # slot 18
    remaining[19] = 3.0  # slot 20
    reserves = [0.1] * 24
    intents = agent.make_bids(remaining, reserves)
    assert len(intents) == 1
    assert intents[0].slot == 19  # slot 20 beats slot 18 at equal distance


def test_split_to_max_supply_slot_when_nothing_fits():
    agent = AgentState(1, demand_24(**{"19": 2.0}), alpha=1.0)
    remaining = [0.0] * 24
    remaining[4] = 1.0
    remaining[9] = 0.4
    reserves = [0.1] * 24
    intents = agent.make_bids(remaining, reserves)
    assert intents == [
        BidIntent(slot=4, quantity=1.0, valuation=0.1, origins=((18, 1.0),))
    ]


def test_chunks_merging_on_shared_target():
    # two unmet slots forced onto the same target merge into one bid
    agent = AgentState(1, demand_24(**{"10": 1.0, "12": 1.0}), alpha=1.3)
    remaining = [0.0] * 24
    remaining[10] = 5.0  # slot 11, distance 1 from both
    reserves = [0.1] * 24
    reserves[10] = 0.3
    intents = agent.make_bids(remaining, reserves)
    assert len(intents) == 1
    intent = intents[0]
    assert intent.slot == 10
    assert intent.quantity == pytest.approx(2.0)
    assert intent.origins == ((9, 1.0), (11, 1.0))
    assert intent.valuation == pytest.approx(1.3 * 0.3)


def test_bid_quantities_never_exceed_unmet():
    rng = random.Random(8)
    for _ in range(100):
        values = tuple(rng.uniform(0.0, 2.0) for _ in range(12))
        if sum(values) <= 0:
            continue
        agent = AgentState(1, LoadVector(values), alpha=1.4)
        remaining = [rng.uniform(0.0, 1.5) for _ in range(12)]
        reserves = [rng.uniform(0.05, 0.2) for _ in range(12)]
        intents = agent.make_bids(remaining, reserves)
        assert sum(i.quantity for i in intents) <= agent.total_unmet + 1e-9
        for intent in intents:
            assert intent.valuation == 1.4 * reserves[intent.slot]  # exact formula


def test_respond_to_partial():
    agent = AgentState(1, demand_24(**{"5": 3.0}), alpha=1.0)
    assert agent.respond_to_partial(1.0, 0.5, own_valuation=0.8)
    assert agent.respond_to_partial(1.0, 0.8, own_valuation=0.8)  # indifferent: accept
    assert not agent.respond_to_partial(1.0, 0.9, own_valuation=0.8)


def test_apply_award_updates_accounting():
    agent = AgentState(1, demand_24(**{"10": 1.0, "12": 1.0}), alpha=1.0)
    intent = BidIntent(slot=10, quantity=2.0, valuation=0.1, origins=((9, 1.0), (11, 1.0)))
    agent.apply_award(intent, 1.5)
    assert agent.obtained[10] == pytest.approx(1.5)
    assert agent.unmet[9] == pytest.approx(0.0)  # first origin served first
    assert agent.unmet[11] == pytest.approx(0.5)
    assert agent.total_obtained + agent.total_unmet == pytest.approx(agent.original_total)


def test_alpha_below_one_rejected():
    with pytest.raises(ValueError):
        AgentState(1, demand_24(**{"5": 1.0}), alpha=0.9)
