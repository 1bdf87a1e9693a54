"""Processing-latency benchmark: sender and receiver in one process.

Measures, per frame, the wall time from handing the block to the sender
until the receiver hands the recovered block back: encode, packetize,
induced packet loss, depacketize, decode.  Frames are processed
back-to-back; pacing would only add idle time to every sample.

Because packets either arrive or drop synchronously here, there is no
transit time: the in-flight age guard is zero, so top-up planning treats
any uncovered send as lost as soon as feedback is exchanged.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..codec import RandomLinearCodec
from ..planner import PlanParams
from ..receiver import ReceiverEngine
from ..sender import SenderEngine
from .. import gf256


@dataclass
class BenchResult:
    frame_size: int
    k: int
    samples_ms: list[float]
    symbols_sent: int
    symbols_delivered: int

    def percentile(self, q: float) -> float:
        xs = sorted(self.samples_ms)
        idx = max(0, -(-int(q) * len(xs) // 100) - 1)
        return xs[idx]

    def median(self) -> float:
        return float(np.median(self.samples_ms))

    def p99(self) -> float:
        return float(np.percentile(self.samples_ms, 99))


def loopback_bench(frame_size: int, frames: int, induced_loss: float = 0.10,
                   symbol_size: int = 1250, seed: int = 1,
                   params: PlanParams | None = None,
                   feedback_every: int = 16,
                   warmup_frames: int = 3) -> BenchResult:
    """Stream `frames` equal-sized blocks through sender -> loss -> receiver.

    Returns per-frame end-to-end processing latencies in milliseconds.
    A few warmup frames run untimed first (JIT compilation), and the
    cyclic garbage collector is held off during each timed frame —
    refcounting still reclaims everything; collection runs between
    frames so its pauses don't masquerade as protocol latency.
    """
    if not 0.0 <= induced_loss < 1.0:
        raise ValueError("induced_loss must be in [0, 1)")
    gf256.warm_kernels()
    params = params or PlanParams()
    codec = RandomLinearCodec()
    sender = SenderEngine(codec, symbol_size, params,
                          min_sample_window=feedback_every,
                          in_flight_guard=0.0)
    receiver = ReceiverEngine(codec)
    rng = np.random.Generator(np.random.PCG64(seed))
    payload = rng.integers(0, 256, frame_size, dtype=np.uint8).tobytes()

    samples: list[float] = []
    delivered = 0
    draws = rng.random(1 << 16)
    ndraw = 0
    import gc
    gc_was_enabled = gc.isenabled()
    gc.disable()
    gc_budget = 0
    sent_baseline = 0
    for fid in range(-warmup_frames, frames):
        if fid == 0:
            sent_baseline = sender.metrics["packets_sent"]
        t0 = time.perf_counter()
        now_ms = t0 * 1e3
        bid = sender.submit_block(payload, now=now_ms)
        done = False
        stall_rounds = 0
        while not done:
            progressed = False
            while True:
                pkt = sender.next_packet(now=now_ms)
                if pkt is None:
                    break
                progressed = True
                header, data = pkt
                if draws[ndraw & 0xFFFF] < induced_loss:
                    ndraw += 1
                    continue
                ndraw += 1
                out = receiver.on_data_packet(header, data, now=now_ms)
                if receiver.packets_since_feedback >= feedback_every:
                    now_ms = time.perf_counter() * 1e3
                    sender.handle_feedback(receiver.make_feedback(now_ms),
                                           now=now_ms)
                if out is not None and header.block_id == bid:
                    if fid >= 0:
                        samples.append((time.perf_counter() - t0) * 1e3)
                        delivered += 1
                    done = True
                    break
            if done:
                break
            # sender idle: exchange feedback so it can top up the shortfall
            now_ms = time.perf_counter() * 1e3
            sender.handle_feedback(receiver.make_feedback(now_ms), now=now_ms)
            if not sender.has_pending():
                stall_rounds = stall_rounds + (0 if progressed else 1)
                if stall_rounds > 3:
                    break  # block completed at sender but never delivered
        receiver.gc_delivered(time.perf_counter() * 1e3, retention=0.0)
        gc_budget += 1
        if gc_budget >= 8:
            gc.collect(1)
            gc_budget = 0
    gc.collect()
    if gc_was_enabled:
        gc.enable()

    return BenchResult(
        frame_size=frame_size,
        k=-(-frame_size // symbol_size),
        samples_ms=samples,
        symbols_sent=sender.metrics["packets_sent"] - sent_baseline,
        symbols_delivered=delivered,
    )


def bench_codec(k: int, symbol_size: int, loss: float = 0.10,
                repetitions: int = 20, seed: int = 7) -> dict:
    """Microbenchmark of raw encode and decode rates for one block shape."""
    from ..codec import BlockDecoder, BlockEncoder, SourceBlock

    gf256.warm_kernels()
    rng = np.random.Generator(np.random.PCG64(seed))
    data = rng.integers(0, 256, k * symbol_size, dtype=np.uint8).tobytes()
    n_extra = max(4, int(k * loss * 1.3) + 2)

    enc_times, dec_times = [], []
    for rep in range(repetitions):
        block = SourceBlock(rep, data, symbol_size)
        t0 = time.perf_counter()
        enc = BlockEncoder(block)
        enc.precompute(range(k, k + n_extra))
        symbols = [enc.symbol(e) for e in range(k + n_extra)]
        enc_times.append(time.perf_counter() - t0)

        keep = rng.random(k + n_extra) >= loss
        t0 = time.perf_counter()
        dec = BlockDecoder(rep, k, symbol_size, len(data))
        for esi, sym in enumerate(symbols):
            if keep[esi]:
                dec.add(esi, sym)
                if dec.decoded:
                    break
        out = dec.try_finish()
        dec_times.append(time.perf_counter() - t0)
        if out is not None and out != data:
            raise AssertionError("decode mismatch in bench")

    mb = k * symbol_size / 1e6
    return {
        "k": k,
        "symbol_size": symbol_size,
        "block_mb": mb,
        "encode_ms_median": float(np.median(enc_times) * 1e3),
        "decode_ms_median": float(np.median(dec_times) * 1e3),
        "encode_mbps": mb / float(np.median(enc_times)),
        "decode_mbps": mb / float(np.median(dec_times)),
    }
