"""Sender state machine: admit blocks, plan redundancy, emit packets.

Sans-I/O: the engine is advanced by three events (block submitted,
feedback received, transmit opportunity) and never touches sockets or
clocks itself.  The transport pulls packets with :meth:`next_packet`;
pacing and rate caps therefore live entirely in the caller.

Packets are never retransmitted: every emitted (block_id, esi) pair is
unique, enforced by a per-block ESI counter.  When feedback shows a
block's expected arrivals falling short of its target, the engine tops
the block up with fresh ESIs instead.

Completion is inferred from feedback.  A block leaves the receiver's
active list either because it was decoded or because nothing at all has
arrived for it, so the engine marks a block done when it is absent while
fully covered (no sends left in flight) and was ever reported active —
or, if it never showed up, when losing every single send is implausible
under the current loss estimate.  In the residual ambiguous case the
block enters a probing regime: one fresh symbol per feedback round keeps
it alive without flooding, until the receiver either reports it active
or silence becomes conclusive.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque
from itertools import islice
from dataclasses import dataclass, field

from .codec import SourceBlock
from .estimator import LossStats, StaleFeedbackError
from .planner import PlanParams, plan_initial, plan_topup
from .wire import DataPacketHeader, FeedbackPacket

ALL_LOST_PLAUSIBILITY = 1e-3


@dataclass
class SenderBlockState:
    block_id: int
    k: int
    block_size: int
    created_at: float
    encoder: object
    esi_next: int = 0
    sent_seqs: list[int] = field(default_factory=list)
    sent_times: list[float] = field(default_factory=list)
    queue: deque = field(default_factory=deque)
    reported_received: int = 0
    ever_reported: bool = False
    probing: bool = False
    completed: bool = False
    completed_at: float | None = None

    @property
    def symbols_sent(self) -> int:
        return len(self.sent_seqs)

    def in_flight(self, horizon: int | None, now: float = 0.0,
                  age_guard: float | None = None) -> int:
        """Sends that may still arrive, plus everything still queued.

        A send is in flight while it is beyond the feedback horizon and,
        when an age guard is set, younger than `age_guard` time units;
        older uncovered sends are presumed lost so top-up planning can
        make progress on quiescent tails.
        """
        cut = 0 if horizon is None else bisect_right(self.sent_seqs, horizon)
        if age_guard is not None:
            cut = max(cut, bisect_right(self.sent_times, now - age_guard))
        return len(self.sent_seqs) - cut + len(self.queue)

    def covered_by(self, horizon: int | None) -> bool:
        """True when every emitted send falls inside the feedback horizon."""
        if not self.sent_seqs or self.queue:
            return False
        if horizon is None:
            return False
        return self.sent_seqs[-1] <= horizon


class SenderEngine:
    def __init__(self, codec, symbol_size: int, params: PlanParams | None = None,
                 min_sample_window: int = 16, rtt_hint: float | None = None,
                 in_flight_guard: float | None = None):
        if symbol_size < 1:
            raise ValueError("symbol_size must be >= 1")
        self.codec = codec
        self.symbol_size = symbol_size
        self.params = params or PlanParams()
        self.stats = LossStats(alpha=self.params.alpha)
        self.min_sample_window = min_sample_window
        self.rtt_hint = rtt_hint
        self.in_flight_guard = in_flight_guard
        self.blocks: dict[int, SenderBlockState] = {}
        self.active_ids: list[int] = []   # oldest first, incomplete only
        self.next_block_id = 0
        self.next_seq = 0
        self.last_feedback_highest: int | None = None
        self.last_feedback_received = 0
        self.last_feedback_time: float | None = None
        self.metrics = {
            "packets_sent": 0,
            "topup_symbols": 0,
            "probe_symbols": 0,
            "stale_feedback": 0,
            "cancelled_symbols": 0,
            "feedback_silence_events": 0,
        }

    # -- block admission ------------------------------------------------

    def submit_block(self, data: bytes | int, now: float = 0.0) -> int:
        """Admit one block; an int submits size-only (payload-free codecs)."""
        block_id = self.next_block_id
        self.next_block_id += 1
        if isinstance(data, int):
            if self.codec.carries_data:
                raise TypeError("size-only submission requires a payload-free codec")
            block_size = data
            k = -(-block_size // self.symbol_size)
            encoder = self.codec.make_encoder_meta(
                block_id, k, self.symbol_size, block_size)
        else:
            block = SourceBlock(block_id, data, self.symbol_size)
            block_size = block.block_size
            k = block.k
            encoder = self.codec.make_encoder(block)
        st = SenderBlockState(block_id, k, block_size, now, encoder)
        n = plan_initial(k, self.stats, self.params)
        st.queue.extend(range(n))
        st.esi_next = n
        self.blocks[block_id] = st
        self.active_ids.append(block_id)
        return block_id

    # -- feedback ingestion ----------------------------------------------

    def handle_feedback(self, fb: FeedbackPacket, now: float = 0.0) -> None:
        if self._is_stale(fb):
            self.metrics["stale_feedback"] += 1
            return
        self.last_feedback_highest = fb.highest_seq_seen
        self.last_feedback_received = fb.total_data_packets_received
        self.last_feedback_time = now
        try:
            self.stats.observe_feedback(
                fb.highest_seq_seen, fb.total_data_packets_received,
                min_window=self.min_sample_window)
        except StaleFeedbackError:
            self.metrics["stale_feedback"] += 1
            return
        entries = dict(fb.entries)
        horizon = fb.highest_seq_seen
        still_active: list[int] = []
        for bid in self.active_ids:
            st = self.blocks[bid]
            if st.completed:
                continue
            if bid in entries:
                st.reported_received = max(st.reported_received, entries[bid])
                st.ever_reported = True
                st.probing = False
                self._topup(st, horizon, now)
            elif st.ever_reported and st.symbols_sent > 0:
                # Per-block receipts never decrease, so a block that was
                # active in an earlier feedback and is absent from this
                # (fresher) one must have been decoded.
                self._complete(st, now)
            elif st.covered_by(horizon):
                # Never reported and nothing left in flight: either it was
                # decoded before any feedback listed it, or every send was
                # lost.
                if self._all_lost_implausible(st):
                    self._complete(st, now)
                else:
                    st.probing = True
                    self._enqueue_probe(st)
            elif not st.probing:
                self._topup(st, horizon, now)
            # probing with sends still in flight: wait for coverage
            if not st.completed:
                still_active.append(bid)
        self.active_ids = still_active

    def _is_stale(self, fb: FeedbackPacket) -> bool:
        if fb.highest_seq_seen is None:
            return self.last_feedback_highest is not None
        if self.last_feedback_highest is None:
            return False
        return (fb.highest_seq_seen < self.last_feedback_highest
                or fb.total_data_packets_received < self.last_feedback_received)

    def _topup(self, st: SenderBlockState, horizon: int | None,
               now: float) -> None:
        flying = st.in_flight(horizon, now, self.in_flight_guard)
        n = plan_topup(st.k, st.reported_received, flying,
                       self.stats, self.params)
        if n > 0:
            st.queue.extend(range(st.esi_next, st.esi_next + n))
            st.esi_next += n
            self.metrics["topup_symbols"] += n

    def _all_lost_implausible(self, st: SenderBlockState) -> bool:
        p = min(0.99, max(self.stats.p_hat, 1e-9))
        return p ** st.symbols_sent < ALL_LOST_PLAUSIBILITY

    def _enqueue_probe(self, st: SenderBlockState) -> None:
        st.queue.append(st.esi_next)
        st.esi_next += 1
        self.metrics["probe_symbols"] += 1

    def _complete(self, st: SenderBlockState, now: float) -> None:
        st.completed = True
        st.completed_at = now
        self.metrics["cancelled_symbols"] += len(st.queue)
        st.queue.clear()

    # -- transmission ----------------------------------------------------

    def next_packet(self, now: float = 0.0) -> tuple[DataPacketHeader, bytes] | None:
        """Pull the next packet: oldest incomplete block, ascending ESI."""
        while self.active_ids and self.blocks[self.active_ids[0]].completed:
            self.active_ids.pop(0)
        st = self._first_sendable()
        if st is None:
            return None
        esi = st.queue.popleft()
        if esi >= st.k and not st.encoder.cached(esi):
            # repair symbols are costly to encode one by one; batch the
            # upcoming queued ones into a single kernel call
            st.encoder.precompute([esi, *islice(st.queue, 7)])
        seq = self.next_seq
        self.next_seq += 1
        st.sent_seqs.append(seq)
        st.sent_times.append(now)
        header = DataPacketHeader(
            global_seq=seq, block_id=st.block_id, esi=esi,
            block_size_bytes=st.block_size, symbol_size=self.symbol_size)
        payload = st.encoder.symbol(esi)
        self.metrics["packets_sent"] += 1
        return header, payload

    def _first_sendable(self) -> SenderBlockState | None:
        for bid in self.active_ids:
            st = self.blocks[bid]
            if not st.completed and st.queue:
                return st
        return None

    def has_pending(self) -> bool:
        return self._first_sendable() is not None

    def check_feedback_silence(self, now: float) -> bool:
        """Flag (in metrics) silence longer than 4 RTTs; no recovery policy.

        `rtt_hint` must be in the same time unit the engine is driven with.
        """
        if self.rtt_hint is None or self.last_feedback_time is None:
            return False
        if now - self.last_feedback_time > 4.0 * self.rtt_hint:
            self.metrics["feedback_silence_events"] += 1
            return True
        return False

    # -- introspection ----------------------------------------------------

    def incomplete_blocks(self) -> list[int]:
        return [b for b in self.active_ids if not self.blocks[b].completed]

    def symbols_sent_for(self, block_id: int) -> int:
        return self.blocks[block_id].symbols_sent
