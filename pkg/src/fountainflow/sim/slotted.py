"""Slotted discrete-time simulation of the fountain protocol against an
idealized retransmission baseline.

The model: frames of k packets become available every `slots_per_frame`
slots; each slot can carry exactly one packet (capping bandwidth at
slots_per_frame / k times the source rate); a packet sent in slot t
arrives, or is known lost, at slot t + D.  Loss is drawn per slot from a
seeded generator, and a paired run evaluates both protocols against the
*same* per-slot draws so their series are directly comparable.

Feedback for the fountain sender is the receiver's counter state made
visible D slots later — the continuous-feedback limit, matching the
instantaneous loss knowledge granted to the retransmission baseline.

The baseline is an optimal ARQ: the receiver learns about a loss exactly
when the packet would have arrived, requests immediately, and the sender
retransmits at the first free slot once the request lands (at t + 2D).
Its latency and bandwidth therefore lower-bound every ARQ protocol.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..codec import IdealCodec
from ..planner import PlanParams
from ..receiver import ReceiverEngine
from ..sender import SenderEngine

WIRE_OVERHEAD = 30  # data-packet header bytes


@dataclass(frozen=True)
class SimConfig:
    frames: int
    packets_per_frame: int          # k
    slots_per_frame: int
    one_way_delay_slots: int
    frame_interval_ms: float
    loss_rate_fn: Callable[[float], float]   # seconds -> loss probability
    seed: int = 1
    symbol_size: int = 1250
    feedback_sample_window: int = 16  # packets per estimator sample
    drain_slot_limit: int = 50_000

    def __post_init__(self) -> None:
        if self.packets_per_frame < 1:
            raise ValueError("packets_per_frame must be >= 1")
        if self.slots_per_frame < self.packets_per_frame:
            raise ValueError("slots_per_frame must be >= packets_per_frame")
        if self.one_way_delay_slots < 0:
            raise ValueError("one_way_delay_slots must be >= 0")

    @property
    def slot_ms(self) -> float:
        return self.frame_interval_ms / self.slots_per_frame

    @property
    def block_size_bytes(self) -> int:
        return self.packets_per_frame * self.symbol_size

    def slot_seconds(self, slot: int) -> float:
        return slot * self.slot_ms / 1000.0


UNDELIVERED = -1.0


@dataclass
class FrameRecord:
    frame_id: int
    t_avail_ms: float
    t_delivered_ms: float     # UNDELIVERED when the run ended first
    packets_sent: int = 0
    packets_arrived: int = 0

    @property
    def delivered(self) -> bool:
        return self.t_delivered_ms != UNDELIVERED

    @property
    def latency_ms(self) -> float:
        if not self.delivered:
            return UNDELIVERED
        return self.t_delivered_ms - self.t_avail_ms


@dataclass
class RunResult:
    protocol: str
    config: SimConfig
    frames: list[FrameRecord]
    sends_per_slot: np.ndarray       # uint8 flags, one per simulated slot
    total_sent: int
    total_arrived: int
    total_lost: int
    send_pairs_count: int                   # (block_id, esi) emissions
    send_pairs_distinct: int | None         # None for protocols that repeat ids
    frame_loss_free: list[bool] = field(default_factory=list)

    def per_second_packets(self) -> np.ndarray:
        """Packets sent per wall second of simulated time."""
        slot_s = self.config.slot_ms / 1000.0
        n_slots = len(self.sends_per_slot)
        seconds = max(1, int(np.ceil(n_slots * slot_s)))
        out = np.zeros(seconds, dtype=np.int64)
        idx = (np.arange(n_slots) * slot_s).astype(np.int64)
        np.add.at(out, idx, self.sends_per_slot)
        return out

    def latencies_ms(self) -> list[float]:
        return [f.latency_ms for f in self.frames if f.delivered]


def _loss_draws(cfg: SimConfig, n_slots: int) -> np.ndarray:
    """Per-slot Bernoulli loss flags shared by paired runs."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    uniforms = rng.random(n_slots)
    rates = np.array(
        [cfg.loss_rate_fn(cfg.slot_seconds(t)) for t in range(n_slots)]
    )
    return uniforms < rates


def _max_slots(cfg: SimConfig) -> int:
    return cfg.frames * cfg.slots_per_frame + cfg.drain_slot_limit


def run_fountain(cfg: SimConfig, params: PlanParams | None = None,
                 loss_flags: np.ndarray | None = None) -> RunResult:
    """Simulate the fountain protocol; returns per-frame records.

    Packets that survive the loss draw are counted as arrived at send
    time (the slot model cannot drop them in flight), so sends always
    equal arrivals plus losses, exactly.
    """
    params = params or PlanParams()
    n_slots = _max_slots(cfg)
    if loss_flags is None:
        loss_flags = _loss_draws(cfg, n_slots)
    delay = cfg.one_way_delay_slots
    codec = IdealCodec()
    rtt_ms = 2 * delay * cfg.slot_ms
    sender = SenderEngine(codec, cfg.symbol_size, params,
                          min_sample_window=cfg.feedback_sample_window,
                          rtt_hint=rtt_ms,
                          in_flight_guard=3.0 * rtt_ms if delay else None)
    receiver = ReceiverEngine(codec)

    frames: list[FrameRecord] = []
    frame_loss_free: list[bool] = []
    arrivals: dict[int, list] = {}
    fb_ring = [None] * max(1, delay)
    sends_per_slot = np.zeros(n_slots, dtype=np.uint8)
    seen_pairs: set[tuple[int, int]] = set()
    pair_count = 0
    total_sent = total_lost = total_arrived = 0
    delivered_count = 0

    t = 0
    while t < n_slots:
        t_ms = t * cfg.slot_ms
        if t % cfg.slots_per_frame == 0:
            fid = t // cfg.slots_per_frame
            if fid < cfg.frames:
                sender.submit_block(cfg.block_size_bytes, now=t_ms)
                frames.append(FrameRecord(fid, t_ms, UNDELIVERED))
                frame_loss_free.append(True)

        for header, payload in arrivals.pop(t, ()):
            data = receiver.on_data_packet(header, payload, now=t_ms)
            if data is not None:
                frames[header.block_id].t_delivered_ms = t_ms
                delivered_count += 1

        if delay == 0:
            sender.handle_feedback(receiver.make_feedback(t_ms), now=t_ms)
        elif fb_ring[t % delay] is not None:
            sender.handle_feedback(fb_ring[t % delay], now=t_ms)

        pkt = sender.next_packet(now=t_ms)
        if pkt is not None:
            header, payload = pkt
            total_sent += 1
            sends_per_slot[t] = 1
            pair_count += 1
            seen_pairs.add((header.block_id, header.esi))
            frames[header.block_id].packets_sent += 1
            if loss_flags[t]:
                total_lost += 1
                frame_loss_free[header.block_id] = False
            else:
                total_arrived += 1
                frames[header.block_id].packets_arrived += 1
                arrivals.setdefault(t + delay, []).append((header, payload))

        if delay > 0:
            # Snapshot at end of slot t; consumed by the sender at t+delay.
            fb_ring[t % delay] = receiver.make_feedback(t_ms)

        t += 1
        if (delivered_count == cfg.frames
                and t >= cfg.frames * cfg.slots_per_frame):
            break

    return RunResult(
        protocol="fountain",
        config=cfg,
        frames=frames,
        sends_per_slot=sends_per_slot[:t],
        total_sent=total_sent,
        total_arrived=total_arrived,
        total_lost=total_lost,
        send_pairs_count=pair_count,
        send_pairs_distinct=len(seen_pairs),
        frame_loss_free=frame_loss_free,
    )


def run_arq_oracle(cfg: SimConfig,
                   loss_flags: np.ndarray | None = None) -> RunResult:
    """Optimal-retransmission baseline under the same slot model.

    Every frame's k source packets are sent fresh (oldest frame first);
    a loss in slot s is known at s+D, the retransmit request lands at
    s+2D, and the retransmission takes the next free slot, competing
    with fresh sends under the same one-packet-per-slot cap.  Requests
    are served oldest first.
    """
    n_slots = _max_slots(cfg)
    if loss_flags is None:
        loss_flags = _loss_draws(cfg, n_slots)
    delay = cfg.one_way_delay_slots
    k = cfg.packets_per_frame

    frames: list[FrameRecord] = []
    frame_loss_free: list[bool] = []
    fresh: list[tuple[int, int]] = []       # FIFO of (frame, pkt) never sent
    fresh_head = 0
    retx: list[tuple[int, int, int, int]] = []  # heap: (eligible_slot, order, frame, pkt)
    retx_order = 0
    received: list[set[int]] = []
    sends_per_slot = np.zeros(n_slots, dtype=np.uint8)
    total_sent = total_lost = total_arrived = 0
    delivered_count = 0
    pair_count = 0

    t = 0
    while t < n_slots:
        if t % cfg.slots_per_frame == 0:
            fid = t // cfg.slots_per_frame
            if fid < cfg.frames:
                frames.append(FrameRecord(fid, t * cfg.slot_ms, UNDELIVERED))
                frame_loss_free.append(True)
                received.append(set())
                fresh.extend((fid, p) for p in range(k))

        send: tuple[int, int] | None = None
        if retx and retx[0][0] <= t:
            _, _, fid, pkt = heapq.heappop(retx)
            send = (fid, pkt)
        elif fresh_head < len(fresh):
            send = fresh[fresh_head]
            fresh_head += 1
        if send is not None:
            fid, pkt = send
            total_sent += 1
            sends_per_slot[t] = 1
            pair_count += 1
            frames[fid].packets_sent += 1
            if loss_flags[t]:
                total_lost += 1
                frame_loss_free[fid] = False
                heapq.heappush(retx, (t + 2 * delay, retx_order, fid, pkt))
                retx_order += 1
            else:
                # arrival lands at t + delay; the slot model never reorders,
                # so delivery bookkeeping can happen eagerly
                total_arrived += 1
                frames[fid].packets_arrived += 1
                got = received[fid]
                got.add(pkt)
                if len(got) == k and frames[fid].t_delivered_ms == UNDELIVERED:
                    frames[fid].t_delivered_ms = (t + delay) * cfg.slot_ms
                    delivered_count += 1

        t += 1
        if (delivered_count == cfg.frames
                and t >= cfg.frames * cfg.slots_per_frame):
            break

    return RunResult(
        protocol="arq-oracle",
        config=cfg,
        frames=frames,
        sends_per_slot=sends_per_slot[:t],
        total_sent=total_sent,
        total_arrived=total_arrived,
        total_lost=total_lost,
        send_pairs_count=pair_count,
        send_pairs_distinct=None,
        frame_loss_free=frame_loss_free,
    )


@dataclass
class PairedResult:
    fountain: RunResult
    oracle: RunResult
    config: SimConfig

    def bandwidth_table(self) -> list[tuple[float, float, float, float]]:
        """(t_s, liquid_mbps, oracle_mbps, loss_rate) per whole second.

        loss_rate is the scheduled rate sampled mid-second.
        """
        bytes_per_packet = self.config.symbol_size + WIRE_OVERHEAD
        f = self.fountain.per_second_packets()
        o = self.oracle.per_second_packets()
        n = max(len(f), len(o))
        f = np.pad(f, (0, n - len(f)))
        o = np.pad(o, (0, n - len(o)))
        rows = []
        for s in range(n):
            loss = self.config.loss_rate_fn(s + 0.5)
            rows.append((
                float(s),
                f[s] * bytes_per_packet * 8 / 1e6,
                o[s] * bytes_per_packet * 8 / 1e6,
                loss,
            ))
        return rows

    def loss_free_frames(self) -> list[bool]:
        """Frames untouched by loss in both runs."""
        return [
            a and b for a, b in
            zip(self.fountain.frame_loss_free, self.oracle.frame_loss_free)
        ]


def paired_run(cfg: SimConfig, params: PlanParams | None = None) -> PairedResult:
    """Run both protocols against the identical per-slot loss draws."""
    flags = _loss_draws(cfg, _max_slots(cfg))
    fountain = run_fountain(cfg, params, loss_flags=flags)
    oracle = run_arq_oracle(cfg, loss_flags=flags)
    return PairedResult(fountain=fountain, oracle=oracle, config=cfg)
