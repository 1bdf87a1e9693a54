from .slotted import (
    FrameRecord,
    PairedResult,
    RunResult,
    SimConfig,
    UNDELIVERED,
    paired_run,
    run_arq_oracle,
    run_fountain,
)
from .trace import LossTrace, spike_loss_trace, stepped_loss_trace

__all__ = [
    "FrameRecord", "PairedResult", "RunResult", "SimConfig", "UNDELIVERED",
    "paired_run", "run_arq_oracle", "run_fountain",
    "LossTrace", "spike_loss_trace", "stepped_loss_trace",
]
