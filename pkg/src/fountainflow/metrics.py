"""Summary statistics and CSV emission shared by the CLI and reports.

The percentile definition here is the contract for anything that
recomputes these numbers from the CSVs (the chart renderer's sidecar
must agree to six decimals): nearest-rank on the ascending sort,
``values[max(0, ceil(q/100 * n) - 1)]``.  Undelivered frames carry
latency -1 and are excluded from latency statistics but counted in
frame totals.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

UNDELIVERED = -1.0

SIM_FRAME_COLUMNS = [
    "protocol", "frame_id", "t_avail_ms", "t_delivered_ms", "latency_ms",
    "packets_sent", "packets_arrived",
]
BANDWIDTH_COLUMNS = ["t_s", "liquid_mbps", "oracle_mbps", "loss_rate"]
EMU_FRAME_COLUMNS = [
    "frame_id", "t_avail_ms", "t_deliver_ms", "latency_ms", "k_symbols",
    "symbols_sent", "symbols_received", "sent_ratio", "recv_ratio",
    "loss_rate_scheduled",
]


def percentile(values: list[float], q: float) -> float:
    """Nearest-rank percentile on the ascending sort."""
    if not values:
        return UNDELIVERED
    xs = sorted(values)
    rank = math.ceil(q / 100.0 * len(xs))
    return xs[max(0, rank - 1)]


def fmt(x: float) -> str:
    """Canonical float formatting: shortest repr, bit-stable."""
    return repr(round(float(x), 9))


def latency_summary(latencies: list[float], delivered: int, total: int,
                    overhead_ratio: float) -> dict:
    return {
        "frames_total": total,
        "frames_delivered": delivered,
        "latency_ms": {
            "p50": percentile(latencies, 50),
            "p95": percentile(latencies, 95),
            "p99": percentile(latencies, 99),
            "max": max(latencies) if latencies else UNDELIVERED,
        },
        "mean_overhead_ratio": overhead_ratio,
    }


def summary_from_sim_frames(rows: list[dict], protocol: str,
                            baseline: str = "oracle") -> dict:
    """Recompute one protocol's summary from frames.csv-shaped dicts.

    mean_overhead_ratio is total packets sent by `protocol` over total
    packets sent by `baseline` (1.0 when summarizing the baseline itself).
    """
    mine = [r for r in rows if r["protocol"] == protocol]
    base = [r for r in rows if r["protocol"] == baseline]
    lat = [float(r["latency_ms"]) for r in mine
           if float(r["latency_ms"]) != UNDELIVERED]
    sent = sum(int(r["packets_sent"]) for r in mine)
    base_sent = sum(int(r["packets_sent"]) for r in base)
    return latency_summary(
        lat, len(lat), len(mine),
        overhead_ratio=sent / base_sent if base_sent else 0.0,
    ) | {"packets_sent": sent}


def summary_from_emu_frames(rows: list[dict]) -> dict:
    lat = [float(r["latency_ms"]) for r in rows
           if float(r["latency_ms"]) != UNDELIVERED]
    delivered = len(lat)
    sent = sum(int(r["symbols_sent"]) for r in rows)
    k = sum(int(r["k_symbols"]) for r in rows)
    return latency_summary(lat, delivered, len(rows),
                           overhead_ratio=sent / k if k else 0.0)


def write_csv(path: Path, columns: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, float) else v for v in row])


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_sim_frames_csv(path: Path, paired) -> None:
    rows = []
    for result in (paired.fountain, paired.oracle):
        label = "liquid" if result.protocol == "fountain" else "oracle"
        for f in result.frames:
            rows.append([
                label, f.frame_id, f.t_avail_ms, f.t_delivered_ms,
                f.latency_ms, f.packets_sent, f.packets_arrived,
            ])
    write_csv(path, SIM_FRAME_COLUMNS, rows)


def write_bandwidth_csv(path: Path, paired) -> None:
    write_csv(path, BANDWIDTH_COLUMNS,
              [list(r) for r in paired.bandwidth_table()])


def write_emu_frames_csv(path: Path, result) -> None:
    rows = []
    for f in result.frames:
        rows.append([
            f.frame_id, f.t_avail_ms, f.t_deliver_ms, f.latency_ms,
            f.k_symbols, f.symbols_sent, f.symbols_received,
            f.sent_ratio, f.recv_ratio, f.loss_rate_scheduled,
        ])
    write_csv(path, EMU_FRAME_COLUMNS, rows)


def write_summary_json(path: Path, summary: dict) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def format_summary_line(name: str, s: dict) -> str:
    lat = s["latency_ms"]
    return (f"{name}: frames {s['frames_delivered']}/{s['frames_total']} "
            f"p50={lat['p50']:.3f}ms p95={lat['p95']:.3f}ms "
            f"p99={lat['p99']:.3f}ms max={lat['max']:.3f}ms "
            f"overhead={s['mean_overhead_ratio']:.6f}")
