"""Real-socket endpoints: stream blocks over UDP with live feedback.

Both endpoints are single-threaded nonblocking loops around one socket
each; the engines stay sans-I/O.  Network impairment is left to external
tooling (e.g. netem on the path); these runners only move datagrams.

Typical use: start `run_receiver` on one host, then `run_sender`
pointed at it.  The receiver returns per-frame records equivalent to
the emulator's, with wall-clock timestamps.
"""

from __future__ import annotations

import select
import socket
import time
from dataclasses import dataclass

from .. import wire
from ..codec import RandomLinearCodec
from ..planner import PlanParams
from ..receiver import ReceiverEngine
from ..sender import SenderEngine
from .emulator import UNDELIVERED, EmuFrameRecord
from .profiles import FeedbackPolicy, StreamProfile


class PortBindError(OSError):
    """Could not bind the requested UDP port."""


@dataclass
class UdpSendReport:
    frames_submitted: int
    packets_sent: int
    bytes_sent: int
    feedback_packets: int
    incomplete_blocks: int


def _bind(address: tuple[str, int]) -> socket.socket:
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        sock.bind(address)
    except OSError as exc:
        sock.close()
        raise PortBindError(f"cannot bind {address[0]}:{address[1]}: {exc}") from exc
    sock.setblocking(False)
    return sock


def run_sender(dest: tuple[str, int], stream: StreamProfile,
               params: PlanParams | None = None,
               bind_port: int = 0, rtt_hint_ms: float = 40.0,
               feedback: FeedbackPolicy | None = None,
               max_frames: int | None = None) -> UdpSendReport:
    """Stream frames to `dest`, adapting redundancy from returned feedback."""
    params = params or PlanParams()
    feedback = feedback or FeedbackPolicy()
    sock = _bind(("0.0.0.0", bind_port))
    sender = SenderEngine(
        RandomLinearCodec(), stream.symbol_size, params,
        min_sample_window=feedback.packet_interval,
        rtt_hint=rtt_hint_ms,
        in_flight_guard=2.0 * rtt_hint_ms + 4.0 * feedback.interval_ms)
    total = max_frames if max_frames is not None else stream.frame_count
    interval = stream.frame_interval_s
    start = time.monotonic()
    fid = 0
    sent_bytes = 0
    fb_count = 0
    try:
        while True:
            now = time.monotonic() - start
            while fid < total and now >= fid * interval:
                size = stream.size_of(fid)
                payload = bytes([(fid * 131) & 0xFF]) * size
                sender.submit_block(payload, now=now * 1e3)
                fid += 1
            while True:
                try:
                    data, _ = sock.recvfrom(65536)
                except BlockingIOError:
                    break
                try:
                    fb = wire.decode_feedback(data)
                except wire.WireDecodeError:
                    continue
                fb_count += 1
                sender.handle_feedback(fb, now=(time.monotonic() - start) * 1e3)
            while True:
                pkt = sender.next_packet(now=(time.monotonic() - start) * 1e3)
                if pkt is None:
                    break
                header, payload = pkt
                datagram = wire.encode_data_packet(header, payload)
                sock.sendto(datagram, dest)
                sent_bytes += len(datagram)
            if fid >= total and not sender.incomplete_blocks():
                break
            if fid >= total and (time.monotonic() - start) > stream.duration_s + 5.0:
                break
            wait = 0.0005
            if fid < total:
                wait = min(max(fid * interval - (time.monotonic() - start), 0.0), 0.01)
            select.select([sock], [], [], wait)
    finally:
        sock.close()
    return UdpSendReport(
        frames_submitted=fid,
        packets_sent=sender.metrics["packets_sent"],
        bytes_sent=sent_bytes,
        feedback_packets=fb_count,
        incomplete_blocks=len(sender.incomplete_blocks()),
    )


def run_receiver(listen: tuple[str, int], expected_frames: int | None = None,
                 idle_timeout_s: float = 10.0,
                 feedback: FeedbackPolicy | None = None,
                 symbol_size_hint: int = 1250) -> list[EmuFrameRecord]:
    """Receive a stream on `listen`; returns per-frame records.

    Stops after `expected_frames` deliveries, or when no datagram has
    arrived within the idle timeout.
    """
    feedback = feedback or FeedbackPolicy()
    sock = _bind(listen)
    receiver = ReceiverEngine(RandomLinearCodec(), stale_block_timeout=2000.0)
    records: dict[int, EmuFrameRecord] = {}
    first_seen: dict[int, float] = {}
    peer = None
    start = time.monotonic()
    last_rx = start
    last_fb = start
    try:
        while True:
            now = time.monotonic()
            if expected_frames is not None and len(
                    [r for r in records.values() if r.delivered]) >= expected_frames:
                break
            if now - last_rx > idle_timeout_s:
                break
            timeout = max(0.0, feedback.interval_ms / 1e3 - (now - last_fb))
            ready, _, _ = select.select([sock], [], [], min(timeout, 0.05))
            if ready:
                for _ in range(256):
                    try:
                        data, addr = sock.recvfrom(65536)
                    except BlockingIOError:
                        break
                    peer = addr
                    last_rx = time.monotonic()
                    try:
                        header, payload = wire.decode_data_packet(data)
                    except wire.WireDecodeError:
                        continue
                    t_ms = (time.monotonic() - start) * 1e3
                    bid = header.block_id
                    if bid not in records:
                        records[bid] = EmuFrameRecord(
                            frame_id=bid, t_avail_ms=t_ms,
                            t_deliver_ms=UNDELIVERED,
                            k_symbols=-(-header.block_size_bytes // header.symbol_size),
                            block_size=header.block_size_bytes)
                        first_seen[bid] = t_ms
                    records[bid].symbols_received += 1
                    out = receiver.on_data_packet(header, payload, now=t_ms)
                    if out is not None:
                        records[bid].t_deliver_ms = (time.monotonic() - start) * 1e3
                    if receiver.packets_since_feedback >= feedback.packet_interval:
                        if peer is not None:
                            sock.sendto(wire.encode_feedback(
                                receiver.make_feedback(t_ms)), peer)
                            last_fb = time.monotonic()
            if (time.monotonic() - last_fb) >= feedback.interval_ms / 1e3:
                if peer is not None:
                    t_ms = (time.monotonic() - start) * 1e3
                    sock.sendto(wire.encode_feedback(
                        receiver.make_feedback(t_ms)), peer)
                last_fb = time.monotonic()
    finally:
        sock.close()
    return [records[k] for k in sorted(records)]
