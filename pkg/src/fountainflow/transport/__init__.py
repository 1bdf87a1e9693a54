from .bench import BenchResult, bench_codec, loopback_bench
from .emulator import EmuFrameRecord, EmuRunResult, run_emulated
from .profiles import FeedbackPolicy, ImpairmentProfile, StreamProfile
from .udp import PortBindError, run_receiver, run_sender

__all__ = [
    "BenchResult", "bench_codec", "loopback_bench",
    "EmuFrameRecord", "EmuRunResult", "run_emulated",
    "FeedbackPolicy", "ImpairmentProfile", "StreamProfile",
    "PortBindError", "run_receiver", "run_sender",
]
