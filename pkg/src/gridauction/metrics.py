"""Per-consumer and system-level outcome measures.

The consumer-side baseline bill is the pro-rata share of generation cost,
total demand priced slot by slot at the reserve (since the reserve is average
cost, one consumer owning a whole slot pays exactly that slot's cost). The
producer's auction revenue is the sum of everything consumers paid: round-0
charges at reserve prices plus auction awards at clearing prices, so revenue
equals the sum of consumer auction costs by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .agents import AgentState
from .auction import AllocationLedger, SessionResult
from .loads import LoadVector, par, total_load
from .parcut import CutResult
from .pricing import CostModel, cost


def shift_percentage(original: LoadVector, obtained: Sequence[float]) -> float:
    """Fraction of a consumer's energy delivered outside its original slot.

    sum_t |obtained(t) - demand(t)| / (2 * total demand); 0 means the profile
    was served exactly as demanded, 1 means everything moved.
    """
    total = total_load(original)
    if total <= 0.0:
        raise ValueError("shift percentage needs a positive total demand")
    moved = sum(abs(obtained[i] - original[i]) for i in range(len(original)))
    return moved / (2.0 * total)


def baseline_cost(demand: LoadVector, reserves: Sequence[float]) -> float:
    """What the consumer pays without any cut or auction: demand at reserve."""
    return sum(demand[i] * reserves[i] for i in range(len(demand)))


def system_cost(model: CostModel, load: LoadVector) -> float:
    """Total generation cost over the day."""
    return sum(cost(model, v) for v in load.values)


def producer_revenue(ledger: AllocationLedger) -> float:
    """Everything consumers paid across round 0 and all auction rounds."""
    return ledger.total_revenue()


@dataclass(frozen=True)
class ConsumerReport:
    consumer_id: int
    alpha: float
    total_demand: float
    total_obtained: float
    shift_fraction: float
    auction_cost: float
    baseline_cost: float
    saving_fraction: float


@dataclass(frozen=True)
class SystemReport:
    cut_percentage: float
    par_before: float
    par_after: float
    system_cost_before: float
    system_cost_after: float
    producer_revenue_auction: float
    producer_revenue_baseline: float
    satisfied: bool


def consumer_report(
    agent: AgentState, ledger: AllocationLedger, reserves: Sequence[float]
) -> ConsumerReport:
    base = baseline_cost(agent.demand, reserves)
    paid = ledger.total_payment(agent.consumer_id)
    saving = 1.0 - paid / base if base > 0.0 else 0.0
    return ConsumerReport(
        consumer_id=agent.consumer_id,
        alpha=agent.alpha,
        total_demand=agent.original_total,
        total_obtained=ledger.total_energy(agent.consumer_id),
        shift_fraction=shift_percentage(agent.demand, ledger.energy_vector(agent.consumer_id)),
        auction_cost=paid,
        baseline_cost=base,
        saving_fraction=saving,
    )


def system_report(
    model: CostModel,
    cut_percentage: float,
    original: LoadVector,
    cut_result: CutResult,
    session: SessionResult | None,
    reserves: Sequence[float],
) -> SystemReport:
    """System-level figures for one scenario run.

    When the cut is infeasible (``session`` is None) the original supply
    stands, so the after-figures equal the before-figures and the auction
    revenue equals the baseline; ``satisfied`` is False because the scenario's
    peak target was not met.
    """
    before_cost = system_cost(model, original)
    baseline_revenue = sum(original[i] * reserves[i] for i in range(len(original)))
    if session is None or cut_result.load is None:
        return SystemReport(
            cut_percentage=cut_percentage,
            par_before=par(original),
            par_after=par(original),
            system_cost_before=before_cost,
            system_cost_after=before_cost,
            producer_revenue_auction=baseline_revenue,
            producer_revenue_baseline=baseline_revenue,
            satisfied=False,
        )
    return SystemReport(
        cut_percentage=cut_percentage,
        par_before=par(original),
        par_after=par(cut_result.load),
        system_cost_before=before_cost,
        system_cost_after=system_cost(model, cut_result.load),
        producer_revenue_auction=producer_revenue(session.ledger),
        producer_revenue_baseline=baseline_revenue,
        satisfied=session.satisfied,
    )
