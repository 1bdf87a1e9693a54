"""Receiver state machine: accumulate symbols, decode, emit feedback.

Same sans-I/O contract as the sender: the transport feeds it parsed data
packets and asks for feedback snapshots; it never blocks or sleeps.

Blocks are delivered the moment their decoder reaches full rank, in
recovery order (out of order across blocks).  Feedback reports the two
global counters plus, for every active block, how many useful (linearly
independent) symbols have arrived — counting dependent duplicates would
overstate progress and stall the sender's top-up planning.
"""

from __future__ import annotations

from dataclasses import dataclass

from .wire import DataPacketHeader, FeedbackPacket


class ProtocolError(Exception):
    """Peer violated the protocol (inconsistent header fields)."""


@dataclass
class ReceiverBlockState:
    block_id: int
    k: int
    block_size: int
    symbol_size: int
    decoder: object
    first_symbol_time: float
    delivered: bool = False
    delivery_time: float | None = None
    symbols_received: int = 0      # every arrival for this block, incl. late
    last_symbol_time: float = 0.0

    @property
    def active(self) -> bool:
        return not self.delivered and self.decoder.rank > 0


class ReceiverCounters:
    __slots__ = ("highest_seq_seen", "total_data_packets_received")

    def __init__(self) -> None:
        self.highest_seq_seen: int | None = None
        self.total_data_packets_received = 0

    def observe(self, seq: int) -> None:
        if self.highest_seq_seen is None or seq > self.highest_seq_seen:
            self.highest_seq_seen = seq
        self.total_data_packets_received += 1


class ReceiverEngine:
    def __init__(self, codec, active_cap: int = 1024,
                 stale_block_timeout: float | None = None):
        self.codec = codec
        self.active_cap = active_cap
        self.stale_block_timeout = stale_block_timeout
        self.counters = ReceiverCounters()
        self.blocks: dict[int, ReceiverBlockState] = {}   # not yet gc'd
        self.active: dict[int, ReceiverBlockState] = {}   # not yet delivered
        self.delivered_ids: set[int] = set()
        self.expired_ids: set[int] = set()
        self.received_per_block: dict[int, int] = {}
        self.packets_since_feedback = 0
        self.metrics = {
            "protocol_errors": 0,
            "active_overflow_drops": 0,
            "late_symbols_discarded": 0,
            "expired_blocks": 0,
            "duplicate_symbols": 0,
        }

    # -- data path ---------------------------------------------------------

    def on_data_packet(self, header: DataPacketHeader, payload: bytes,
                       now: float = 0.0) -> bytes | None:
        """Process one data packet; returns the block bytes on delivery."""
        self.counters.observe(header.global_seq)
        self.packets_since_feedback += 1
        bid = header.block_id
        self.received_per_block[bid] = self.received_per_block.get(bid, 0) + 1
        if bid in self.delivered_ids or bid in self.expired_ids:
            self.metrics["late_symbols_discarded"] += 1
            return None
        st = self.blocks.get(bid)
        if st is None:
            if len(self.active) >= self.active_cap:
                self.metrics["active_overflow_drops"] += 1
                return None
            k = -(-header.block_size_bytes // header.symbol_size)
            st = ReceiverBlockState(
                block_id=bid, k=k, block_size=header.block_size_bytes,
                symbol_size=header.symbol_size,
                decoder=self.codec.make_decoder(
                    bid, k, header.symbol_size, header.block_size_bytes),
                first_symbol_time=now,
            )
            self.blocks[bid] = st
            self.active[bid] = st
        elif (st.block_size != header.block_size_bytes
              or st.symbol_size != header.symbol_size):
            self.metrics["protocol_errors"] += 1
            raise ProtocolError(
                f"block {bid}: header size fields changed mid-block"
            )
        st.symbols_received += 1
        st.last_symbol_time = now
        innovative = st.decoder.add(header.esi, payload)
        if not innovative and not st.decoder.decoded:
            self.metrics["duplicate_symbols"] += 1
        if st.decoder.decoded and not st.delivered:
            data = st.decoder.try_finish()
            st.delivered = True
            st.delivery_time = now
            self.delivered_ids.add(bid)
            del self.active[bid]
            return data
        return None

    # -- feedback path -------------------------------------------------------

    def make_feedback(self, now: float = 0.0) -> FeedbackPacket:
        """Snapshot of counters plus per-active-block useful-symbol counts."""
        entries = tuple(
            (bid, self.active[bid].decoder.rank) for bid in sorted(self.active)
        )
        self.packets_since_feedback = 0
        return FeedbackPacket(
            highest_seq_seen=self.counters.highest_seq_seen,
            total_data_packets_received=self.counters.total_data_packets_received,
            entries=entries,
        )

    # -- housekeeping ----------------------------------------------------------

    def gc_delivered(self, now: float, retention: float) -> int:
        """Drop decoder state of blocks delivered more than `retention` ago.

        Their ids stay recorded so late symbols are still discarded and
        counted rather than resurrecting state.
        """
        evict = [
            bid for bid, st in self.blocks.items()
            if st.delivered and st.delivery_time is not None
            and now - st.delivery_time > retention
        ]
        for bid in evict:
            del self.blocks[bid]
        return len(evict)

    def expire_stale(self, now: float) -> int:
        """Expire active blocks that stopped making progress (sender gone)."""
        if self.stale_block_timeout is None:
            return 0
        evict = [
            bid for bid, st in self.active.items()
            if now - st.last_symbol_time > self.stale_block_timeout
        ]
        for bid in evict:
            del self.blocks[bid]
            del self.active[bid]
            self.expired_ids.add(bid)
            self.metrics["expired_blocks"] += 1
        return len(evict)

    # -- introspection -----------------------------------------------------------

    def received_for(self, block_id: int) -> int:
        return self.received_per_block.get(block_id, 0)


class InOrderDelivery:
    """Optional shim that re-orders delivered blocks by block id.

    Holds out-of-order deliveries in a jitter buffer of bounded size;
    when the buffer overflows, the oldest gap is abandoned and delivery
    resumes (late blocks for abandoned ids are dropped).  Off by default
    everywhere; the protocol itself delivers in recovery order.
    """

    def __init__(self, max_buffered: int = 64):
        self.max_buffered = max_buffered
        self.next_id = 0
        self.buffer: dict[int, bytes] = {}

    def push(self, block_id: int, data: bytes) -> list[tuple[int, bytes]]:
        out: list[tuple[int, bytes]] = []
        if block_id < self.next_id:
            return out
        self.buffer[block_id] = data
        while self.next_id in self.buffer:
            out.append((self.next_id, self.buffer.pop(self.next_id)))
            self.next_id += 1
        while len(self.buffer) > self.max_buffered:
            self.next_id = min(self.buffer)
            while self.next_id in self.buffer:
                out.append((self.next_id, self.buffer.pop(self.next_id)))
                self.next_id += 1
        return out
