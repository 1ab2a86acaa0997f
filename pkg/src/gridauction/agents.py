"""Bidding agents: valuation factors and the truthful myopic strategy.

Each consumer is represented by an agent that re-derives its bids every round
from the fresh supply snapshot, with no memory beyond what it still needs and
what it has obtained. Unit valuations are alpha * reserve price of the slot
actually bid on, where alpha >= 1 is the consumer's willingness-to-pay factor
drawn once per consumer.

For each slot of unmet need the agent bids on that slot when it still carries
enough supply; otherwise on the closest slot that can cover the whole chunk,
preferring the later slot on distance ties. When no single slot can cover the
chunk, the agent bids for what fits on the slot with the most supply left, a
splitting rule that guarantees the session keeps making progress on
fragmented supply. Chunks that land on the same slot merge into one bid,
since their unit valuation is identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Sequence

from .auction import BidIntent
from .loads import EPSILON_KWH, LoadVector
from .pricing import PRICE_EPSILON


@dataclass(frozen=True)
class ValuationDistribution:
    """Discrete distribution over willingness-to-pay factors."""

    name: str
    values: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.weights):
            raise ValueError("values and weights must have equal length")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")

    def sample(self, rng: Random) -> float:
        u = rng.random()
        cumulative = 0.0
        for value, weight in zip(self.values, self.weights):
            cumulative += weight
            if u < cumulative:
                return value
        return self.values[-1]


#: Five-level factor set with 40/20/20/10/10 weights, skewed like a household
#: wealth distribution.
US_DISTRIBUTION = ValuationDistribution(
    "us", (1.0, 1.3, 1.5, 1.6, 1.9), (0.4, 0.2, 0.2, 0.1, 0.1)
)

#: Equiprobable factors 1.0, 1.1, ..., 1.9.
UNIFORM_DISTRIBUTION = ValuationDistribution(
    "uniform",
    tuple(round(1.0 + k / 10.0, 1) for k in range(10)),
    (0.1,) * 10,
)

_DISTRIBUTIONS = {d.name: d for d in (US_DISTRIBUTION, UNIFORM_DISTRIBUTION)}


def valuation_distribution(name: str) -> ValuationDistribution:
    try:
        return _DISTRIBUTIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown valuation distribution {name!r}; choose from {sorted(_DISTRIBUTIONS)}"
        ) from None


def sample_alpha(distribution: ValuationDistribution, rng: Random) -> float:
    """Draw one willingness-to-pay factor."""
    return distribution.sample(rng)


class AgentState:
    """Mutable bidding state for one consumer.

    Tracks remaining need per original slot and energy obtained per delivery
    slot. The accounting identity total_obtained + total_unmet ==
    total original demand holds after every update, provided round-0
    guarantees never exceed a consumer's per-slot demand.
    """

    def __init__(
        self,
        consumer_id: int,
        demand: LoadVector,
        alpha: float,
        initial_obtained: Sequence[float] | None = None,
    ):
        if alpha < 1.0:
            raise ValueError(f"valuation factor must be >= 1, got {alpha}")
        self.consumer_id = consumer_id
        self.demand = demand
        self.alpha = alpha
        n = len(demand)
        if initial_obtained is None:
            initial_obtained = (0.0,) * n
        if len(initial_obtained) != n:
            raise ValueError("initial_obtained length must match the demand grid")
        self.obtained = [float(v) for v in initial_obtained]
        self.unmet = [max(0.0, demand[i] - self.obtained[i]) for i in range(n)]
        self.original_total = sum(demand.values)

    @property
    def total_obtained(self) -> float:
        return sum(self.obtained)

    @property
    def total_unmet(self) -> float:
        return sum(self.unmet)

    def make_bids(
        self, remaining: Sequence[float], reserves: Sequence[float]
    ) -> list[BidIntent]:
        """Bids for this round, one per target slot, from the supply snapshot."""
        n = len(self.unmet)
        chunks: dict[int, list[tuple[int, float]]] = {}
        for slot in range(n):
            need = self.unmet[slot]
            if need <= EPSILON_KWH:
                continue
            if remaining[slot] >= need - EPSILON_KWH:
                target, quantity = slot, need
            else:
                fits = [s for s in range(n) if remaining[s] >= need - EPSILON_KWH]
                if fits:
                    # Closest slot that covers the chunk; later slot on ties.
                    target = min(fits, key=lambda s: (abs(s - slot), -s))
                    quantity = need
                else:
                    best = max(range(n), key=lambda s: (remaining[s], -abs(s - slot), s))
                    if remaining[best] <= EPSILON_KWH:
                        continue
                    target, quantity = best, min(need, remaining[best])
            chunks.setdefault(target, []).append((slot, quantity))

        intents = []
        for target in sorted(chunks):
            origins = tuple(sorted(chunks[target]))
            quantity = sum(q for _, q in origins)
            valuation = self.alpha * reserves[target]
            if valuation < reserves[target] - PRICE_EPSILON:
                continue
            intents.append(
                BidIntent(slot=target, quantity=quantity, valuation=valuation, origins=origins)
            )
        return intents

    def respond_to_partial(
        self, offered_qty: float, clearing_price: float, own_valuation: float
    ) -> bool:
        """Accept a partial fill iff the price does not exceed the valuation.

        Indifference resolves toward acceptance (utility 0 is not worse than
        walking away). Truthful bids screened by the reserve always accept.
        """
        return clearing_price <= own_valuation + PRICE_EPSILON

    def apply_award(self, intent: BidIntent, quantity: float) -> None:
        """Book a won quantity against the bid's original slots of need."""
        self.obtained[intent.slot] += quantity
        left = quantity
        for origin_slot, origin_qty in intent.origins:
            if left <= EPSILON_KWH:
                break
            take = min(left, origin_qty, self.unmet[origin_slot])
            self.unmet[origin_slot] -= take
            left -= take
