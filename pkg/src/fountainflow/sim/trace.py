"""Time-varying loss-rate schedules.

A trace is a list of (time_s, rate) breakpoints interpreted either
piecewise-linearly or as a step function holding each rate until the
next breakpoint.  Before the first breakpoint the first rate applies;
after the last, the last rate holds.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass


@dataclass(frozen=True)
class LossTrace:
    breakpoints: tuple[tuple[float, float], ...]
    interpolation: str = "linear"   # "linear" | "step"

    def __post_init__(self) -> None:
        if not self.breakpoints:
            raise ValueError("trace needs at least one breakpoint")
        times = [t for t, _ in self.breakpoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("breakpoint times must be strictly increasing")
        if any(not 0.0 <= r <= 1.0 for _, r in self.breakpoints):
            raise ValueError("loss rates must be in [0, 1]")
        if self.interpolation not in ("linear", "step"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")

    def rate_at(self, t: float) -> float:
        pts = self.breakpoints
        if t <= pts[0][0]:
            return pts[0][1]
        if t >= pts[-1][0]:
            return pts[-1][1]
        i = bisect_right([p[0] for p in pts], t) - 1
        t0, r0 = pts[i]
        t1, r1 = pts[i + 1]
        if self.interpolation == "step":
            return r0
        frac = (t - t0) / (t1 - t0)
        return r0 + frac * (r1 - r0)

    def __call__(self, t: float) -> float:
        return self.rate_at(t)


def spike_loss_trace(peak: float = 0.30) -> LossTrace:
    """The synthetic varying-loss schedule used by the slotted comparison.

    Lossless start, a spike rising from 0.5 s to its peak at 0.83 s,
    a fast drop until 1.33 s, then a slow decay back to zero by 3 s.
    The peak level is approximate by nature and therefore a knob.
    """
    return LossTrace(
        breakpoints=(
            (0.0, 0.0),
            (0.5, 0.0),
            (0.83, peak),
            (1.33, peak / 6.0),
            (3.0, 0.0),
        ),
        interpolation="linear",
    )


def stepped_loss_trace(rates: list[float], segment_s: float,
                       start_s: float = 0.0) -> LossTrace:
    """Hold each rate for segment_s seconds, in order."""
    return LossTrace(
        breakpoints=tuple(
            (start_s + i * segment_s, r) for i, r in enumerate(rates)
        ),
        interpolation="step",
    )
