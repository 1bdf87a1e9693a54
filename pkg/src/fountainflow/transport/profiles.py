"""Stream and network-impairment descriptions shared by the transports."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..sim.trace import LossTrace

ZERO_LOSS = LossTrace(breakpoints=((0.0, 0.0),))


@dataclass(frozen=True)
class StreamProfile:
    """A frame source: fps, repeating size pattern, total duration."""

    fps: float
    frame_sizes: tuple[int, ...]
    duration_s: float
    symbol_size: int = 1250

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise ValueError("fps must be > 0")
        if not self.frame_sizes or any(s < 1 for s in self.frame_sizes):
            raise ValueError("frame sizes must be >= 1 byte")
        if self.duration_s <= 0:
            raise ValueError("duration must be > 0")
        if not 1 <= self.symbol_size < 1 << 16:
            raise ValueError("symbol_size must fit a 16-bit field")

    @property
    def frame_interval_s(self) -> float:
        return 1.0 / self.fps

    @property
    def frame_count(self) -> int:
        return int(round(self.duration_s * self.fps))

    def size_of(self, frame_id: int) -> int:
        return self.frame_sizes[frame_id % len(self.frame_sizes)]

    def mean_rate_mbps(self) -> float:
        per_cycle = sum(self.frame_sizes)
        return per_cycle * 8 * self.fps / len(self.frame_sizes) / 1e6


@dataclass(frozen=True)
class ImpairmentProfile:
    """One-way delays, a forward loss schedule, and an optional rate cap."""

    forward_delay_ms: float = 20.0
    reverse_delay_ms: float = 20.0
    loss: LossTrace = ZERO_LOSS
    rate_cap_mbps: float | None = None
    feedback_loss: LossTrace | None = None   # off by default
    seed: int = 1

    def __post_init__(self) -> None:
        if self.forward_delay_ms < 0 or self.reverse_delay_ms < 0:
            raise ValueError("delays must be >= 0")
        if self.rate_cap_mbps is not None and self.rate_cap_mbps <= 0:
            raise ValueError("rate cap must be positive when set")


@dataclass(frozen=True)
class FeedbackPolicy:
    """When the receiver emits feedback: every interval, or sooner after
    every `packet_interval` data packets."""

    interval_ms: float = 5.0
    packet_interval: int = 16

    def __post_init__(self) -> None:
        if self.interval_ms <= 0 or self.packet_interval < 1:
            raise ValueError("feedback cadence fields must be positive")
