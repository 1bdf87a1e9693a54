"""Smoothed packet-loss estimation from cumulative feedback counters.

Each feedback packet carries the highest global sequence number seen and
the total number of data packets received.  The delta between two
feedbacks yields one loss fraction sample; an EWMA tracks the mean and
the variance of those samples.

Because samples are fractions over finite windows, their variance never
falls below the binomial noise floor p(1-p)/window even when the true
loss rate is perfectly constant.  The estimator therefore also tracks
the mean window size, letting the redundancy planner subtract that floor
and react only to genuine rate fluctuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

VAR_MAX = 0.25  # variance ceiling of a [0,1]-valued quantity


class StaleFeedbackError(ValueError):
    """Cumulative counters regressed: feedback is out of date."""


def loss_sample(prev: tuple[int, int], cur: tuple[int, int]) -> float | None:
    """Loss fraction between two (highest_seq, received_count) snapshots.

    Returns None when no new sequence numbers were covered.  Raises
    StaleFeedbackError when either counter regresses; the caller should
    drop the packet.
    """
    d_highest = cur[0] - prev[0]
    d_received = cur[1] - prev[1]
    if d_highest < 0 or d_received < 0:
        raise StaleFeedbackError(
            f"counters regressed: highest {prev[0]}->{cur[0]}, "
            f"received {prev[1]}->{cur[1]}"
        )
    if d_highest == 0:
        return None
    return min(1.0, max(0.0, 1.0 - d_received / d_highest))


@dataclass
class LossStats:
    """EWMA loss-rate estimate with sample variance and window tracking."""

    alpha: float = 0.1
    p_hat: float = 0.0
    var_hat: float = 0.0
    mean_window: float | None = None
    samples: int = 0
    last_highest: int | None = None
    last_received: int = 0
    _pending_highest: int | None = field(default=None, repr=False)
    _pending_received: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")

    def update(self, sample: float, window: float | None = None) -> None:
        """Fold one loss-fraction sample into the EWMA state."""
        if not 0.0 <= sample <= 1.0:
            raise ValueError(f"sample out of [0,1]: {sample}")
        a = self.alpha
        self.p_hat = (1.0 - a) * self.p_hat + a * sample
        self.p_hat = min(1.0, max(0.0, self.p_hat))
        dev = sample - self.p_hat
        self.var_hat = (1.0 - a) * self.var_hat + a * dev * dev
        self.var_hat = min(VAR_MAX, max(0.0, self.var_hat))
        if window is not None and window > 0:
            if self.mean_window is None:
                self.mean_window = float(window)
            else:
                self.mean_window = (1.0 - a) * self.mean_window + a * window
        self.samples += 1

    def observe_feedback(self, highest: int | None, received: int,
                         min_window: int = 1) -> float | None:
        """Digest one feedback's cumulative counters.

        Deltas are accumulated until at least ``min_window`` sequence
        numbers are covered, then folded in as one sample.  Returns the
        sample when one was taken.  Raises StaleFeedbackError on counter
        regression.
        """
        if highest is None:
            return None
        if self.last_highest is None:
            # First observation anchors the window; sequence numbers start
            # at 0, so `highest` covers highest+1 sends.
            self.last_highest = -1
            self.last_received = 0
        if highest < self.last_highest or received < self.last_received:
            raise StaleFeedbackError(
                f"counters regressed: highest {self.last_highest}->{highest}, "
                f"received {self.last_received}->{received}"
            )
        if self._pending_highest is None:
            self._pending_highest = self.last_highest
            self._pending_received = self.last_received
        self.last_highest = highest
        self.last_received = received
        window = highest - self._pending_highest
        if window < max(1, min_window):
            return None
        sample = loss_sample(
            (self._pending_highest, self._pending_received), (highest, received)
        )
        self._pending_highest = None
        self._pending_received = 0
        if sample is None:
            return None
        self.update(sample, window=window)
        return sample

    def fluctuation_var(self) -> float:
        """Sample variance in excess of the binomial window-noise floor."""
        if self.mean_window is None:
            return self.var_hat
        floor = self.p_hat * (1.0 - self.p_hat) / max(1.0, self.mean_window)
        return max(0.0, self.var_hat - floor)

    def headroom_loss_rate(self, z_var: float, p_cap: float,
                           subtract_window_noise: bool = True) -> float:
        """p_hat plus z_var standard deviations of headroom, capped."""
        var = self.fluctuation_var() if subtract_window_noise else self.var_hat
        p = self.p_hat + z_var * math.sqrt(var)
        return min(p_cap, max(0.0, p))


def ewma_update(stats: LossStats, sample: float) -> LossStats:
    """Functional wrapper over LossStats.update (returns the same object)."""
    stats.update(sample)
    return stats
