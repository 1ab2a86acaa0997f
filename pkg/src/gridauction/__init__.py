"""Supply-side peak cutting with auction-based load redistribution.

A deterministic, seedable simulator: the daily aggregate load has its peak
cut by a configured percentage without changing the total, and the resulting
supply is redistributed to consumers through a multi-round, per-slot
uniform-price auction run by truthful myopic bidding agents.
"""

from .agents import (
    US_DISTRIBUTION,
    UNIFORM_DISTRIBUTION,
    AgentState,
    ValuationDistribution,
    sample_alpha,
    valuation_distribution,
)
from .auction import (
    AllocationLedger,
    Bid,
    BidIntent,
    SessionResult,
    SlotOutcome,
    clear_slot,
    initialize_allocations,
    run_session,
)
from .loads import (
    EPSILON_KWH,
    ConsumerDemand,
    LoadVector,
    TimeGrid,
    aggregate,
    par,
    total_load,
)
from .metrics import (
    ConsumerReport,
    SystemReport,
    baseline_cost,
    consumer_report,
    producer_revenue,
    shift_percentage,
    system_cost,
    system_report,
)
from .parcut import INFEASIBLE, CutResult, is_feasible, par_cut
from .pricing import CostModel, cost, reserve_prices
from .scenario import (
    ConfigError,
    DemandProfile,
    ScenarioConfig,
    generate_demands,
    load_config,
    sample_alphas,
)
from .experiment import ExperimentResult, run_experiment, run_trial

__all__ = [
    "AgentState",
    "AllocationLedger",
    "Bid",
    "BidIntent",
    "ConfigError",
    "ConsumerDemand",
    "ConsumerReport",
    "CostModel",
    "CutResult",
    "DemandProfile",
    "EPSILON_KWH",
    "ExperimentResult",
    "INFEASIBLE",
    "LoadVector",
    "ScenarioConfig",
    "SessionResult",
    "SlotOutcome",
    "SystemReport",
    "TimeGrid",
    "UNIFORM_DISTRIBUTION",
    "US_DISTRIBUTION",
    "ValuationDistribution",
    "aggregate",
    "baseline_cost",
    "clear_slot",
    "consumer_report",
    "cost",
    "generate_demands",
    "initialize_allocations",
    "is_feasible",
    "load_config",
    "par",
    "par_cut",
    "producer_revenue",
    "reserve_prices",
    "run_experiment",
    "run_session",
    "run_trial",
    "sample_alpha",
    "sample_alphas",
    "shift_percentage",
    "system_cost",
    "system_report",
    "total_load",
    "valuation_distribution",
]
