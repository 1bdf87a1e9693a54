/** Summary statistics — the same definitions the CLI uses (FORMAT.md):
 * nearest-rank percentiles over delivered frames, overhead as total
 * sent over the baseline (paired runs) or over total k (emulated runs).
 * The sidecar written next to each chart must match the CLI's
 * summary.json to six decimals. */

import { Table, num } from "./csv.js";

export const UNDELIVERED = -1.0;

export interface LatencySummary {
  frames_total: number;
  frames_delivered: number;
  latency_ms: { p50: number; p95: number; p99: number; max: number };
  mean_overhead_ratio: number;
}

export function percentile(values: number[], q: number): number {
  if (values.length === 0) return UNDELIVERED;
  const xs = [...values].sort((a, b) => a - b);
  const rank = Math.ceil((q / 100) * xs.length);
  return xs[Math.max(0, rank - 1)];
}

function summary(
  latencies: number[],
  total: number,
  overhead: number,
): LatencySummary {
  return {
    frames_total: total,
    frames_delivered: latencies.length,
    latency_ms: {
      p50: percentile(latencies, 50),
      p95: percentile(latencies, 95),
      p99: percentile(latencies, 99),
      max: latencies.length ? Math.max(...latencies) : UNDELIVERED,
    },
    mean_overhead_ratio: overhead,
  };
}

/** Paired simulate frames.csv: one summary per protocol column value. */
export function summarizeSimFrames(
  table: Table,
  protocol: string,
  baseline = "oracle",
): LatencySummary & { packets_sent: number } {
  const mine = table.rows.filter((r) => r.protocol === protocol);
  const base = table.rows.filter((r) => r.protocol === baseline);
  const lat = mine
    .map((r) => num(r, "latency_ms"))
    .filter((v) => v !== UNDELIVERED);
  const sent = mine.reduce((a, r) => a + num(r, "packets_sent"), 0);
  const baseSent = base.reduce((a, r) => a + num(r, "packets_sent"), 0);
  return {
    ...summary(lat, mine.length, baseSent ? sent / baseSent : 0),
    packets_sent: sent,
  };
}

/** Emulated-run frames.csv summary. */
export function summarizeEmuFrames(table: Table): LatencySummary {
  const lat = table.rows
    .map((r) => num(r, "latency_ms"))
    .filter((v) => v !== UNDELIVERED);
  const sent = table.rows.reduce((a, r) => a + num(r, "symbols_sent"), 0);
  const k = table.rows.reduce((a, r) => a + num(r, "k_symbols"), 0);
  return summary(lat, table.rows.length, k ? sent / k : 0);
}
