"""The two datagrams on the wire, byte by byte."""

from fountainflow import wire

h = wire.DataPacketHeader(global_seq=7, block_id=2, esi=515,
                          block_size_bytes=625_000, symbol_size=1250)
pkt = wire.encode_data_packet(h, b"\xab\xcd")
print("data packet (payload shortened to 2 bytes):")
print(" ", pkt.hex(" "))
print("  magic 4c51 | ver 01 | type 01 | seq", h.global_seq,
      "| block", h.block_id, "| esi", h.esi,
      "| size", h.block_size_bytes, "| ssz", h.symbol_size)
print("  header is exactly", wire.DATA_HEADER_SIZE, "bytes of overhead per symbol")

fb = wire.FeedbackPacket(highest_seq_seen=999,
                         total_data_packets_received=950,
                         entries=((7, 312),))
raw = wire.encode_feedback(fb)
print("\nfeedback packet:")
print(" ", raw.hex(" "))
print("  highest seen 999, 950 packets received,"
      " 1 active block: (block 7, 312 useful symbols)")
print("  roundtrip:", wire.decode_feedback(raw) == fb)

print("\nnothing-received-yet feedback uses the all-ones sentinel:")
print(" ", wire.encode_feedback(wire.FeedbackPacket(None, 0, ())).hex(" "))

print("\ndecoders never crash on junk:")
for blob in (b"", b"\x00" * 40, raw[:-3]):
    try:
        wire.decode_feedback(blob)
    except wire.WireDecodeError as exc:
        print(f"  {blob[:8].hex() or '<empty>'}...: {type(exc).__name__}: {exc}")
