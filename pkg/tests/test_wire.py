import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fountainflow import wire
from fountainflow.wire import (
    BadMagicError, DataPacketHeader, FeedbackPacket, InvalidFieldError,
    PacketTypeError, TruncatedPacketError, UnsupportedVersionError,
    WireDecodeError, decode_data_packet, decode_feedback, encode_data_packet,
    encode_feedback,
)

HEADERS = st.builds(
    DataPacketHeader,
    global_seq=st.integers(0, 2**64 - 1),
    block_id=st.integers(0, 2**64 - 1),
    esi=st.integers(0, 2**32 - 1),
    block_size_bytes=st.integers(1, 2**32 - 1),
    symbol_size=st.integers(1, 2**16 - 1),
)


def test_golden_data_packet():
    h = DataPacketHeader(global_seq=0, block_id=0, esi=0,
                         block_size_bytes=1, symbol_size=1)
    pkt = encode_data_packet(h, b"\x42")
    assert wire.DATA_HEADER_SIZE == 30
    assert len(pkt) == 31  # 30-byte header plus the 1-byte payload
    assert pkt[:4] == bytes([0x4C, 0x51, 0x01, 0x01])
    h2, payload = decode_data_packet(pkt)
    assert h2 == h and payload == b"\x42"


def test_per_symbol_overhead_is_30_bytes():
    h = DataPacketHeader(7, 8, 9, 12_500, 1250)
    pkt = encode_data_packet(h, bytes(1250))
    assert len(pkt) - 1250 == 30


def test_golden_feedback_roundtrip():
    fb = FeedbackPacket(highest_seq_seen=999,
                        total_data_packets_received=950,
                        entries=((7, 312),))
    data = encode_feedback(fb)
    assert len(data) == 22 + 12
    assert decode_feedback(data) == fb


def test_feedback_nothing_seen_sentinel():
    fb = FeedbackPacket(None, 0, ())
    data = encode_feedback(fb)
    assert data[4:12] == b"\xff" * 8
    assert decode_feedback(data) == fb


def test_feedback_counter_invariant_enforced():
    with pytest.raises(InvalidFieldError):
        encode_feedback(FeedbackPacket(10, 12, ()))
    with pytest.raises(InvalidFieldError):
        encode_feedback(FeedbackPacket(None, 3, ()))


def test_distinct_parse_errors():
    h = DataPacketHeader(1, 2, 3, 4, 5)
    good = encode_data_packet(h, bytes(5))
    with pytest.raises(BadMagicError):
        decode_data_packet(b"\x00\x00" + good[2:])
    with pytest.raises(UnsupportedVersionError):
        decode_data_packet(good[:2] + b"\x09" + good[3:])
    with pytest.raises(PacketTypeError):
        decode_data_packet(good[:3] + b"\x02" + good[4:])
    with pytest.raises(TruncatedPacketError):
        decode_data_packet(good[:17])
    with pytest.raises(TruncatedPacketError):
        decode_data_packet(b"")
    fb = encode_feedback(FeedbackPacket(9, 5, ((1, 2), (3, 4))))
    with pytest.raises(TruncatedPacketError):
        decode_feedback(fb[:-1])
    with pytest.raises(PacketTypeError):
        decode_feedback(good)


def test_zero_size_fields_rejected():
    with pytest.raises(InvalidFieldError):
        encode_data_packet(DataPacketHeader(0, 0, 0, 0, 1), b"")
    raw = struct.pack(">HBBQQIIH", 0x4C51, 1, 1, 0, 0, 0, 1, 0)
    with pytest.raises(InvalidFieldError):
        decode_data_packet(raw)


@settings(max_examples=500, deadline=None)
@given(HEADERS, st.binary(max_size=64))
def test_data_roundtrip_canonical(header, payload):
    data = encode_data_packet(header, payload)
    h2, p2 = decode_data_packet(data)
    assert h2 == header and p2 == payload
    assert encode_data_packet(h2, p2) == data


@settings(max_examples=500, deadline=None)
@given(
    st.one_of(st.none(), st.integers(0, 2**64 - 2)),
    st.data(),
)
def test_feedback_roundtrip_canonical(highest, data):
    total = 0 if highest is None else data.draw(st.integers(0, highest + 1))
    entries = tuple(sorted(data.draw(st.dictionaries(
        st.integers(0, 2**64 - 1), st.integers(0, 2**32 - 1), max_size=5,
    )).items()))
    fb = FeedbackPacket(highest, total, entries)
    raw = encode_feedback(fb)
    assert decode_feedback(raw) == fb
    assert encode_feedback(decode_feedback(raw)) == raw


def test_fuzz_never_crashes():
    import numpy as np
    rng = np.random.default_rng(0xF00D)
    blob = rng.integers(0, 256, 3_000_000, dtype=np.uint8).tobytes()
    pos = 0
    for _ in range(20_000):
        n = int(rng.integers(1, 120))
        chunk = blob[pos:pos + n]
        pos = (pos + n) % (len(blob) - 4000)
        for fn in (decode_data_packet, decode_feedback):
            try:
                fn(chunk)
            except WireDecodeError:
                pass
    # valid-prefix mutations: flip bytes inside otherwise-valid packets
    h = DataPacketHeader(5, 6, 7, 800, 100)
    base = bytearray(encode_data_packet(h, bytes(100)))
    for _ in range(20_000):
        i = int(rng.integers(0, len(base)))
        v = int(rng.integers(0, 256))
        mutated = bytes(base[:i]) + bytes([v]) + bytes(base[i + 1:])
        try:
            decode_data_packet(mutated)
        except WireDecodeError:
            pass
