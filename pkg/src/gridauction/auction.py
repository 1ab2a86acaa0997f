"""Uniform-price multiunit clearing and the multi-round auction session.

Single-slot clearing follows three rules: winners are the highest bidders,
they tentatively cover the whole supply, and the winner set is the smallest
one that does. All winners pay the valuation of the highest non-winning
bidder; when everyone wins, they pay the slot's reserve price so the producer
is never paid zero. Quantities are filled in descending-valuation order, so
only the lowest winner can be partially filled, and she may accept the
partial quantity or walk away.

Equal valuations are ordered by ascending agent id. This makes the winner
set, the clearing price, and every fill deterministic.

A session starts from round-0 allocations (full demand wherever the cut
supply covers it, plus the minimal per-consumer guarantee in shortage slots,
both charged at the slot reserve price) and then runs bidding rounds until no
supply or no bids remain. Each round collects simultaneous per-slot bids
against the round's opening supply snapshot and clears every slot
independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Protocol, Sequence

from .loads import EPSILON_KWH, ConsumerDemand, LoadVector, aggregate
from .pricing import PRICE_EPSILON

#: Tolerance for the post-hoc demand-satisfiability check, in kWh.
SATISFIED_TOL_KWH = 1e-6

STOP_SUPPLY_EXHAUSTED = "supply_exhausted"
STOP_NO_BIDS = "no_bids"
STOP_ROUND_CAP = "round_cap"


@dataclass(frozen=True)
class Bid:
    """A request for ``quantity`` kWh at up to ``valuation`` per kWh."""

    agent_id: int
    quantity: float
    valuation: float

    def __post_init__(self):
        if self.quantity <= EPSILON_KWH:
            raise ValueError(f"bid quantity must be positive, got {self.quantity}")
        if self.valuation < 0.0:
            raise ValueError(f"bid valuation must be >= 0, got {self.valuation}")


@dataclass(frozen=True)
class SlotOutcome:
    """Result of clearing one slot in one round."""

    winners: tuple[tuple[int, float], ...]
    clearing_price: float
    leftover_supply: float
    walkaways: frozenset[int] = frozenset()

    def allocation(self, agent_id: int) -> float:
        return sum(q for aid, q in self.winners if aid == agent_id)


@dataclass(frozen=True)
class BidIntent:
    """One agent's bid on one slot, with the original slots of need it serves.

    ``origins`` holds (original_slot, quantity) pairs in ascending slot order;
    their quantities sum to ``quantity``. Awards are booked against origins in
    that order.
    """

    slot: int
    quantity: float
    valuation: float
    origins: tuple[tuple[int, float], ...]


class BiddingAgent(Protocol):
    consumer_id: int
    original_total: float

    def make_bids(
        self, remaining: Sequence[float], reserves: Sequence[float]
    ) -> list[BidIntent]: ...

    def respond_to_partial(
        self, offered_qty: float, clearing_price: float, own_valuation: float
    ) -> bool: ...

    def apply_award(self, intent: BidIntent, quantity: float) -> None: ...


def clear_slot(
    bids: Iterable[Bid],
    supply: float,
    reserve: float,
    partial_decision: Callable[[int, float, float], bool] | None = None,
) -> SlotOutcome:
    """Clear one slot: winner set, uniform price, fills, partial-fill offer.

    Bids valued strictly below the reserve are rejected up front; they could
    never win at a payable price. ``partial_decision(agent_id, offered_qty,
    clearing_price)`` resolves the marginal winner's accept-or-walk-away
    offer; by default she accepts, which is the truthful choice since the
    price never exceeds a winner's stated valuation. A walk-away returns her
    quantity to the leftover supply.

    An empty bid set (or one fully screened by the reserve) yields an outcome
    with zero winners and the full supply left over.
    """
    if supply < 0.0:
        raise ValueError(f"supply must be >= 0, got {supply}")
    eligible = [b for b in bids if b.valuation >= reserve - PRICE_EPSILON]
    order = sorted(eligible, key=lambda b: (-b.valuation, b.agent_id))

    covered = 0.0
    cut = 0
    while cut < len(order) and covered < supply - EPSILON_KWH:
        covered += order[cut].quantity
        cut += 1
    winning_bids = order[:cut]
    losing_bids = order[cut:]

    if losing_bids:
        price = losing_bids[0].valuation
    else:
        price = reserve

    winners: list[tuple[int, float]] = []
    walkaways: set[int] = set()
    remaining = supply
    for b in winning_bids:
        take = min(b.quantity, remaining)
        if take < b.quantity - EPSILON_KWH:
            accept = True
            if partial_decision is not None:
                accept = partial_decision(b.agent_id, take, price)
            if not accept:
                walkaways.add(b.agent_id)
                continue
        winners.append((b.agent_id, take))
        remaining -= take

    return SlotOutcome(
        winners=tuple(winners),
        clearing_price=price,
        leftover_supply=remaining,
        walkaways=frozenset(walkaways),
    )


class AllocationLedger:
    """Cumulative per-consumer, per-slot energy awards and payments."""

    def __init__(self, consumer_ids: Iterable[int], slot_count: int):
        ids = list(consumer_ids)
        self.slot_count = slot_count
        self._energy = {cid: [0.0] * slot_count for cid in ids}
        self._paid = {cid: [0.0] * slot_count for cid in ids}
        self.rounds_completed = 0

    @property
    def consumer_ids(self) -> list[int]:
        return list(self._energy)

    def add(self, consumer_id: int, slot: int, quantity: float, unit_price: float) -> None:
        if quantity < 0.0 or unit_price < 0.0:
            raise ValueError("allocations and prices must be non-negative")
        self._energy[consumer_id][slot] += quantity
        self._paid[consumer_id][slot] += quantity * unit_price

    def energy_vector(self, consumer_id: int) -> tuple[float, ...]:
        return tuple(self._energy[consumer_id])

    def total_energy(self, consumer_id: int) -> float:
        return sum(self._energy[consumer_id])

    def total_payment(self, consumer_id: int) -> float:
        return sum(self._paid[consumer_id])

    def delivered_by_slot(self) -> tuple[float, ...]:
        totals = [0.0] * self.slot_count
        for per_slot in self._energy.values():
            for i, v in enumerate(per_slot):
                totals[i] += v
        return tuple(totals)

    def total_revenue(self) -> float:
        return sum(sum(per_slot) for per_slot in self._paid.values())


def initialize_allocations(
    demands: Sequence[ConsumerDemand],
    cut_load: LoadVector,
    reserves: Sequence[float],
    guarantee_kwh: float = 0.0,
) -> tuple[AllocationLedger, LoadVector]:
    """Round-0 distribution before any bidding.

    Surplus slots (cut supply covers the original aggregate) hand every
    consumer exactly her demand. Shortage slots hand every consumer the
    minimal guarantee instead, which requires supply of at least
    guarantee * population there. Both are charged at the slot reserve price,
    the system's stated price floor.

    Returns the seeded ledger and the per-slot supply left for the auction.
    """
    if guarantee_kwh < 0.0:
        raise ValueError(f"guarantee must be >= 0 kWh, got {guarantee_kwh}")
    n = len(cut_load)
    original = aggregate(demands, n)
    population = len(demands)
    ledger = AllocationLedger((d.consumer_id for d in demands), n)

    remaining = []
    for slot in range(n):
        supply = cut_load[slot]
        if supply >= original[slot] - EPSILON_KWH:
            handed = 0.0
            for d in demands:
                qty = d.demand[slot]
                if qty > 0.0:
                    ledger.add(d.consumer_id, slot, qty, reserves[slot])
                    handed += qty
        else:
            floor = guarantee_kwh * population
            if supply < floor - EPSILON_KWH:
                raise ValueError(
                    f"slot {slot + 1}: cut supply {supply:.6f} kWh cannot honour the "
                    f"{guarantee_kwh} kWh guarantee for {population} consumers "
                    f"(needs {floor:.6f} kWh)"
                )
            handed = 0.0
            if guarantee_kwh > 0.0:
                for d in demands:
                    ledger.add(d.consumer_id, slot, guarantee_kwh, reserves[slot])
                    handed += guarantee_kwh
        left = supply - handed
        remaining.append(left if left > EPSILON_KWH else 0.0)

    return ledger, LoadVector(tuple(remaining))


@dataclass(frozen=True)
class SessionResult:
    """Final state of a multi-round auction session."""

    ledger: AllocationLedger
    rounds: int
    stop_reason: str
    satisfied: bool
    unsatisfied: tuple[int, ...]
    leftover: LoadVector
    trace: tuple[dict, ...] = ()


def run_session(
    agents: Sequence[BiddingAgent],
    supply: LoadVector,
    reserves: Sequence[float],
    ledger: AllocationLedger,
    round_cap: int = 1000,
    record_trace: bool = False,
) -> SessionResult:
    """Run bidding rounds until no supply is left or no bids arrive.

    Each round opens with a supply snapshot, collects every agent's bids
    against it, clears the slots independently, books awards into the ledger,
    and rolls leftovers (including walk-away returns) into the next round.
    Remaining total supply never increases, and strictly decreases whenever
    any bid meets its reserve, so the round cap is a safety net only; hitting
    it is reported as a distinct stop reason, never silently.

    Whether every consumer ends with her full demand is checked after the
    loop and reported per consumer; it is the expected outcome, not an
    enforced constraint.
    """
    if round_cap < 1:
        raise ValueError(f"round_cap must be >= 1, got {round_cap}")
    by_id = {agent.consumer_id: agent for agent in agents}
    remaining = list(supply.values)
    trace: list[dict] = []
    stop_reason = STOP_ROUND_CAP

    for round_no in range(1, round_cap + 1):
        if max(remaining) <= EPSILON_KWH:
            stop_reason = STOP_SUPPLY_EXHAUSTED
            break

        snapshot = tuple(remaining)
        by_slot: dict[int, list[tuple[BiddingAgent, BidIntent]]] = {}
        for agent in sorted(agents, key=lambda a: a.consumer_id):
            for intent in agent.make_bids(snapshot, reserves):
                by_slot.setdefault(intent.slot, []).append((agent, intent))

        if not by_slot:
            stop_reason = STOP_NO_BIDS
            break

        for slot in sorted(by_slot):
            slot_supply = snapshot[slot]
            entries = by_slot[slot]
            if slot_supply <= EPSILON_KWH:
                continue
            intent_by_agent = {agent.consumer_id: intent for agent, intent in entries}
            bids = [
                Bid(agent.consumer_id, intent.quantity, intent.valuation)
                for agent, intent in entries
            ]

            def offer(agent_id: int, offered: float, price: float) -> bool:
                return by_id[agent_id].respond_to_partial(
                    offered, price, intent_by_agent[agent_id].valuation
                )

            outcome = clear_slot(bids, slot_supply, reserves[slot], partial_decision=offer)
            for agent_id, qty in outcome.winners:
                by_id[agent_id].apply_award(intent_by_agent[agent_id], qty)
                ledger.add(agent_id, slot, qty, outcome.clearing_price)
            remaining[slot] = outcome.leftover_supply

            if record_trace:
                won = dict(outcome.winners)
                for agent, intent in entries:
                    trace.append(
                        {
                            "round": round_no,
                            "slot": slot + 1,
                            "agent_id": agent.consumer_id,
                            "bid_qty_kwh": intent.quantity,
                            "bid_price": intent.valuation,
                            "won_qty_kwh": won.get(agent.consumer_id, 0.0),
                            "clearing_price": outcome.clearing_price,
                        }
                    )

        ledger.rounds_completed = round_no

    if stop_reason == STOP_ROUND_CAP and max(remaining) <= EPSILON_KWH:
        stop_reason = STOP_SUPPLY_EXHAUSTED

    unsatisfied = tuple(
        agent.consumer_id
        for agent in sorted(agents, key=lambda a: a.consumer_id)
        if abs(ledger.total_energy(agent.consumer_id) - agent.original_total) > SATISFIED_TOL_KWH
    )

    return SessionResult(
        ledger=ledger,
        rounds=ledger.rounds_completed,
        stop_reason=stop_reason,
        satisfied=not unsatisfied,
        unsatisfied=unsatisfied,
        leftover=LoadVector(tuple(remaining)),
        trace=tuple(trace),
    )
