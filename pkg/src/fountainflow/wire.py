"""Bit-exact wire format for the two UDP packet types.

All integers are big-endian.  Layouts (sizes in bytes):

Data packet (type 0x01), header 30 bytes followed by the symbol payload::

    magic(2)=0x4C51 version(1)=1 type(1)=0x01 global_seq(8) block_id(8)
    esi(4) block_size_bytes(4) symbol_size(2) payload(...)

Feedback packet (type 0x02), 22 bytes plus 12 per entry::

    magic(2) version(1) type(1)=0x02 highest_seq_seen(8)
    total_data_packets_received(8) active_count(2)
    then active_count * (block_id(8) symbols_received(4))

``highest_seq_seen`` uses 2^64-1 as the nothing-received-yet sentinel
(global sequence numbers start at 0, so 0 alone cannot express "none").
Decoders never raise anything other than WireDecodeError subclasses on
arbitrary input.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

MAGIC = 0x4C51
VERSION = 1
TYPE_DATA = 0x01
TYPE_FEEDBACK = 0x02

DATA_HEADER = struct.Struct(">HBBQQIIH")
FEEDBACK_HEAD = struct.Struct(">HBBQQH")
FEEDBACK_ENTRY = struct.Struct(">QI")

DATA_HEADER_SIZE = DATA_HEADER.size            # 30
FEEDBACK_HEAD_SIZE = FEEDBACK_HEAD.size        # 22
FEEDBACK_ENTRY_SIZE = FEEDBACK_ENTRY.size      # 12

NO_SEQ_SENTINEL = (1 << 64) - 1


class WireDecodeError(ValueError):
    """Base class for all parse failures."""


class BadMagicError(WireDecodeError):
    pass


class UnsupportedVersionError(WireDecodeError):
    pass


class TruncatedPacketError(WireDecodeError):
    pass


class PacketTypeError(WireDecodeError):
    pass


class InvalidFieldError(WireDecodeError):
    pass


@dataclass(frozen=True)
class DataPacketHeader:
    global_seq: int
    block_id: int
    esi: int
    block_size_bytes: int
    symbol_size: int

    def validate(self) -> None:
        if not 0 <= self.global_seq < 1 << 64:
            raise InvalidFieldError(f"global_seq out of range: {self.global_seq}")
        if not 0 <= self.block_id < 1 << 64:
            raise InvalidFieldError(f"block_id out of range: {self.block_id}")
        if not 0 <= self.esi < 1 << 32:
            raise InvalidFieldError(f"esi out of range: {self.esi}")
        if not 1 <= self.block_size_bytes < 1 << 32:
            raise InvalidFieldError(f"block_size_bytes out of range: {self.block_size_bytes}")
        if not 1 <= self.symbol_size < 1 << 16:
            raise InvalidFieldError(f"symbol_size out of range: {self.symbol_size}")


@dataclass(frozen=True)
class FeedbackPacket:
    highest_seq_seen: int | None
    total_data_packets_received: int
    entries: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def validate(self) -> None:
        if self.highest_seq_seen is None:
            if self.total_data_packets_received != 0:
                raise InvalidFieldError("packets received but no sequence seen")
        else:
            if not 0 <= self.highest_seq_seen < (1 << 64) - 1:
                raise InvalidFieldError("highest_seq_seen out of range")
            if self.total_data_packets_received > self.highest_seq_seen + 1:
                raise InvalidFieldError(
                    "total received exceeds highest sequence seen + 1"
                )
        if len(self.entries) >= 1 << 16:
            raise InvalidFieldError("too many feedback entries")
        for bid, got in self.entries:
            if not 0 <= bid < 1 << 64:
                raise InvalidFieldError(f"entry block_id out of range: {bid}")
            if not 0 <= got < 1 << 32:
                raise InvalidFieldError(f"entry symbol count out of range: {got}")


def encode_data_packet(header: DataPacketHeader, payload: bytes) -> bytes:
    header.validate()
    return DATA_HEADER.pack(
        MAGIC, VERSION, TYPE_DATA,
        header.global_seq, header.block_id, header.esi,
        header.block_size_bytes, header.symbol_size,
    ) + payload


def _check_prelude(data: bytes, want_type: int) -> None:
    if len(data) < 4:
        raise TruncatedPacketError(f"packet of {len(data)} bytes has no prelude")
    magic, version, ptype = struct.unpack_from(">HBB", data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic 0x{magic:04X}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}")
    if ptype != want_type:
        raise PacketTypeError(f"expected type 0x{want_type:02X}, got 0x{ptype:02X}")


def decode_data_packet(data: bytes) -> tuple[DataPacketHeader, bytes]:
    _check_prelude(data, TYPE_DATA)
    if len(data) < DATA_HEADER_SIZE:
        raise TruncatedPacketError(
            f"data packet truncated: {len(data)} < {DATA_HEADER_SIZE}"
        )
    (_, _, _, seq, block_id, esi, block_size, symbol_size) = DATA_HEADER.unpack_from(data)
    header = DataPacketHeader(seq, block_id, esi, block_size, symbol_size)
    header.validate()
    return header, data[DATA_HEADER_SIZE:]


def encode_feedback(fb: FeedbackPacket) -> bytes:
    fb.validate()
    highest = NO_SEQ_SENTINEL if fb.highest_seq_seen is None else fb.highest_seq_seen
    parts = [FEEDBACK_HEAD.pack(
        MAGIC, VERSION, TYPE_FEEDBACK,
        highest, fb.total_data_packets_received, len(fb.entries),
    )]
    parts.extend(FEEDBACK_ENTRY.pack(bid, got) for bid, got in fb.entries)
    return b"".join(parts)


def decode_feedback(data: bytes) -> FeedbackPacket:
    _check_prelude(data, TYPE_FEEDBACK)
    if len(data) < FEEDBACK_HEAD_SIZE:
        raise TruncatedPacketError(
            f"feedback packet truncated: {len(data)} < {FEEDBACK_HEAD_SIZE}"
        )
    (_, _, _, highest, total, count) = FEEDBACK_HEAD.unpack_from(data)
    want = FEEDBACK_HEAD_SIZE + count * FEEDBACK_ENTRY_SIZE
    if len(data) != want:
        raise TruncatedPacketError(
            f"feedback with {count} entries must be {want} bytes, got {len(data)}"
        )
    entries = tuple(
        FEEDBACK_ENTRY.unpack_from(data, FEEDBACK_HEAD_SIZE + i * FEEDBACK_ENTRY_SIZE)
        for i in range(count)
    )
    fb = FeedbackPacket(
        None if highest == NO_SEQ_SENTINEL else highest,
        total,
        entries,
    )
    fb.validate()
    return fb


def packet_type(data: bytes) -> int:
    """Peek the packet type byte (for transport dispatch)."""
    if len(data) < 4:
        raise TruncatedPacketError("too short to classify")
    return data[3]
