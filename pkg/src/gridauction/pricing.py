"""Convex generation-cost models and per-slot reserve prices.

Two cost forms are supported:

* ``quadratic``: cost(L) = c1*L^2 + c2*L + c3 with c1 > 0 (coefficients are
  user-supplied; there are no canonical defaults).
* ``experiment``: cost(L) = ((L + q1) / (q2 * sqrt(population)))^2, where q1
  is the producer's fixed margin and q2 controls price growth.

Reserve prices are the producer's stated price floor per slot: the average
cost of the original aggregate load, p(t) = cost(L(t)) / L(t). Slots with no
baseline demand get price 0 (there is nothing to pro-rate). All prices are
per kWh, matching the kWh unit of every load quantity.

Note that cost(L)/L for the experiment form is increasing only for L >= q1;
below that, lighter slots price higher than heavier ones. That regime is
legal but usually unintended, so ``reserve_monotonicity_warning`` reports it
for a given baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .loads import EPSILON_KWH, LoadVector

#: Absolute tolerance for money-per-kWh comparisons.
PRICE_EPSILON = 1e-9

QUADRATIC = "quadratic"
EXPERIMENT = "experiment"


@dataclass(frozen=True)
class CostModel:
    form: str
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    q1: float = 0.0
    q2: float = 1.0
    population: int = 1

    @classmethod
    def quadratic(cls, c1: float, c2: float = 0.0, c3: float = 0.0) -> "CostModel":
        if c1 <= 0.0:
            raise ValueError(f"quadratic cost needs c1 > 0, got {c1}")
        return cls(form=QUADRATIC, c1=c1, c2=c2, c3=c3)

    @classmethod
    def experiment(cls, q1: float, q2: float, population: int) -> "CostModel":
        if q1 < 0.0:
            raise ValueError(f"q1 must be >= 0, got {q1}")
        if q2 <= 0.0:
            raise ValueError(f"q2 must be > 0, got {q2}")
        if population < 1:
            raise ValueError(f"population must be >= 1, got {population}")
        return cls(form=EXPERIMENT, q1=q1, q2=q2, population=population)


def cost(model: CostModel, load: float) -> float:
    """Generation cost of serving ``load`` kWh in one slot."""
    if load < 0.0:
        raise ValueError(f"load must be >= 0, got {load}")
    if model.form == QUADRATIC:
        return model.c1 * load * load + model.c2 * load + model.c3
    if model.form == EXPERIMENT:
        scaled = (load + model.q1) / (model.q2 * math.sqrt(model.population))
        return scaled * scaled
    raise ValueError(f"unknown cost form {model.form!r}")


def reserve_prices(model: CostModel, baseline: LoadVector) -> tuple[float, ...]:
    """Per-slot price floors p(t) = cost(L(t)) / L(t) from the uncut aggregate.

    Zero-load slots price at 0: nobody demands them at baseline, and any
    auction bid placed there still pays at least that round's clearing price.
    """
    prices = []
    for v in baseline.values:
        if v <= EPSILON_KWH:
            prices.append(0.0)
        else:
            prices.append(cost(model, v) / v)
    return tuple(prices)


def is_increasing_convex(model: CostModel, max_load: float, samples: int = 64) -> bool:
    """Sample-check that cost is non-decreasing with non-negative curvature."""
    if max_load <= 0.0:
        raise ValueError("max_load must be positive")
    step = max_load / samples
    values = [cost(model, k * step) for k in range(samples + 1)]
    diffs = [b - a for a, b in zip(values, values[1:])]
    tol = 1e-12 * max(1.0, max(abs(v) for v in values))
    if any(d < -tol for d in diffs):
        return False
    return all(b - a >= -tol for a, b in zip(diffs, diffs[1:]))


def reserve_monotonicity_warning(model: CostModel, baseline: LoadVector) -> str | None:
    """Report slots where a heavier load prices below a lighter one.

    Returns a warning string, or None when higher-load slots are at least as
    expensive per kWh everywhere (the intended pricing regime).
    """
    slots = [(v, i) for i, v in enumerate(baseline.values) if v > EPSILON_KWH]
    slots.sort()
    prices = reserve_prices(model, baseline)
    for (lo_v, lo_i), (hi_v, hi_i) in zip(slots, slots[1:]):
        if hi_v - lo_v <= EPSILON_KWH:
            continue
        if prices[hi_i] < prices[lo_i] - PRICE_EPSILON:
            return (
                f"reserve price is not increasing in load: slot {hi_i + 1} "
                f"({hi_v:.3f} kWh at {prices[hi_i]:.6g}/kWh) prices below slot "
                f"{lo_i + 1} ({lo_v:.3f} kWh at {prices[lo_i]:.6g}/kWh); "
                "for the experiment form this happens when loads fall below q1"
            )
    return None
