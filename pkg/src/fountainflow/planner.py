"""How many symbols to send so that enough survive random loss.

Arrivals out of n sends under loss rate p are modeled as binomial; the
planner picks the smallest n whose Gaussian lower tail still clears the
target:

    n*(1-p) - z_bin*sqrt(n*p*(1-p)) >= target

The loss rate fed into that bound is the estimator mean inflated by
z_var standard deviations of measured rate fluctuation, so headroom
grows automatically when the network is unstable.  A closed form for
the minimal n exists (quadratic in sqrt(n)); it is cross-checked against
the defining inequality and nudged so it always equals the scan minimum
despite floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .estimator import LossStats


@dataclass(frozen=True)
class PlanParams:
    """Knobs for the redundancy planner.

    c_extra=None selects the size-scaled default max(2, ceil(0.005*k)).
    """

    z_var: float = 1.0
    z_bin: float = 2.0
    c_extra: int | None = None
    p_cap: float = 0.9
    alpha: float = 0.1
    subtract_window_noise: bool = True

    def __post_init__(self) -> None:
        if self.z_var < 0 or self.z_bin < 0:
            raise ValueError("z_var and z_bin must be >= 0")
        if self.c_extra is not None and self.c_extra < 0:
            raise ValueError("c_extra must be >= 0")
        if not 0.0 <= self.p_cap < 1.0:
            raise ValueError("p_cap must be in [0, 1)")

    def extra_for(self, k: int) -> int:
        if self.c_extra is not None:
            return self.c_extra
        return max(2, math.ceil(0.005 * k))

    def planning_loss_rate(self, stats: LossStats) -> float:
        return stats.headroom_loss_rate(
            self.z_var, self.p_cap, self.subtract_window_noise
        )


def expected_floor(n: int, p: float, z_bin: float) -> float:
    """Gaussian lower bound on arrivals out of n sends at loss rate p."""
    q = 1.0 - p
    return n * q - z_bin * math.sqrt(n * p * q)


def min_sends_for(target: int, p: float, z_bin: float) -> int:
    """Smallest n with expected_floor(n, p, z_bin) >= target."""
    if target <= 0:
        return 0
    if p <= 0.0:
        return target
    q = 1.0 - p
    pq = p * q
    x = (z_bin * math.sqrt(pq) + math.sqrt(z_bin * z_bin * pq + 4.0 * q * target)) / (2.0 * q)
    n = max(target, math.ceil(x * x))
    # Guard against float rounding at the boundary: the result must be the
    # exact minimum of the defining inequality.
    while n > target and expected_floor(n - 1, p, z_bin) >= target:
        n -= 1
    while expected_floor(n, p, z_bin) < target:
        n += 1
    return n


def plan_initial(k: int, stats: LossStats, params: PlanParams) -> int:
    """Symbols to send up front for a fresh block of k symbols."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = params.planning_loss_rate(stats)
    return min_sends_for(k + params.extra_for(k), p, params.z_bin)


def plan_topup(k: int, reported_received: int, in_flight: int,
               stats: LossStats, params: PlanParams) -> int:
    """Additional symbols so reported + expected in-flight arrivals
    reach k + c_extra.  Returns 0 when the block is already covered."""
    target = k + params.extra_for(k) - reported_received
    if target <= 0:
        return 0
    p = params.planning_loss_rate(stats)
    need_outstanding = min_sends_for(target, p, params.z_bin)
    return max(0, need_outstanding - in_flight)
