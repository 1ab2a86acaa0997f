"""Supply-side peak cutting by nearest-slot load shifting.

Every slot above the target peak ``(1 - cut) * old_peak`` is lowered to the
target and its excess is parked in nearby slots that have headroom, scanning
outward one slot at a time and trying the forward slot before the backward one
at each radius. Receiving slots are filled only up to the target, so the total
load is conserved while the peak drops by exactly the requested fraction.

Cutting is not always possible: once every slot sits at the target there is
nowhere left to put excess. That outcome is a value (``CutResult.feasible`` is
False), not an exception, because experiment sweeps treat it as a legitimate
data point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .loads import EPSILON_KWH, LoadVector, total_load


@dataclass(frozen=True)
class CutResult:
    """Either the flattened load vector, or the infeasible marker (load=None)."""

    load: LoadVector | None

    @property
    def feasible(self) -> bool:
        return self.load is not None


INFEASIBLE = CutResult(None)


def _check_args(load: LoadVector, cut_percentage: float) -> None:
    if not 0.0 < cut_percentage <= 1.0:
        raise ValueError(f"cut percentage must be in (0, 1], got {cut_percentage}")
    if total_load(load) <= EPSILON_KWH:
        raise ValueError("cannot cut an all-zero load vector")


def is_feasible(load: LoadVector, cut_percentage: float) -> bool:
    """Closed-form feasibility: total <= target_peak * slot_count.

    The slots below the new peak have exactly ``target * n - total`` kWh less
    headroom than the over-peak slots have excess, so the cut succeeds iff the
    total fits under a flat ceiling at the target.
    """
    _check_args(load, cut_percentage)
    target = (1.0 - cut_percentage) * load.peak()
    return total_load(load) <= target * len(load) + EPSILON_KWH


def par_cut(load: LoadVector, cut_percentage: float) -> CutResult:
    """Shift excess out of over-peak slots so the new peak is (1-c) * old peak.

    Over-peak slots are processed in ascending slot order. For each, the
    excess is moved to slots at radius d = 1, 2, ... trying slot i+d before
    slot i-d; a receiving slot is considered full once within EPSILON_KWH of
    the target, which keeps floating-point residue from causing extra scans.

    Returns INFEASIBLE when excess remains after every slot has been tried.
    """
    _check_args(load, cut_percentage)
    n = len(load)
    values = list(load.values)
    target = (1.0 - cut_percentage) * max(values)

    for i in range(n):
        if values[i] <= target + EPSILON_KWH:
            continue
        excess = values[i] - target
        d = 1
        while excess > EPSILON_KWH:
            fwd = i + d
            back = i - d
            if fwd >= n and back < 0:
                return INFEASIBLE
            if fwd < n and values[fwd] < target - EPSILON_KWH:
                moved = min(excess, target - values[fwd])
                values[i] -= moved
                values[fwd] += moved
                excess -= moved
            if excess > EPSILON_KWH and back >= 0 and values[back] < target - EPSILON_KWH:
                moved = min(excess, target - values[back])
                values[i] -= moved
                values[back] += moved
                excess -= moved
            d += 1

    return CutResult(LoadVector(tuple(values)))
