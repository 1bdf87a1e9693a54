/** Chart assembly for the three report kinds.
 *
 * paired  — two panels from a paired simulate run: per-second
 *           transmission bandwidth (protocol vs optimal baseline) and
 *           per-frame delivery latency.
 * stacked — three panels from an emulated run: latency on top, then
 *           received ratio with frame size on the right axis, then sent
 *           ratio with the scheduled loss rate on the right axis.
 * bench   — processing-latency samples per frame size.
 */

import { Table, ReportInputError, num, readCsv, requireColumns } from "./csv.js";
import { LatencySummary, summarizeEmuFrames, summarizeSimFrames, UNDELIVERED } from "./stats.js";
import { Panel, renderPanels } from "./svg.js";

export interface RenderResult {
  svg: string;
  sidecar: Record<string, unknown>;
}

function deliveredSeries(rows: Record<string, string>[], latCol: string,
                         availCol: string): { x: number[]; y: number[] } {
  const x: number[] = [];
  const y: number[] = [];
  for (const r of rows) {
    const lat = num(r, latCol);
    if (lat === UNDELIVERED) continue;
    x.push(num(r, availCol) / 1000);
    y.push(lat);
  }
  if (x.length === 0) {
    throw new ReportInputError("no delivered frames to plot");
  }
  return { x, y };
}

export function renderPaired(inputDir: string): RenderResult {
  const frames = readCsv(`${inputDir}/frames.csv`);
  requireColumns(frames, ["protocol", "frame_id", "t_avail_ms", "latency_ms",
                          "packets_sent"], `${inputDir}/frames.csv`);
  const bw = readCsv(`${inputDir}/bandwidth.csv`);
  requireColumns(bw, ["t_s", "liquid_mbps", "oracle_mbps", "loss_rate"],
                 `${inputDir}/bandwidth.csv`);

  const liquid = frames.rows.filter((r) => r.protocol === "liquid");
  const oracle = frames.rows.filter((r) => r.protocol === "oracle");
  if (liquid.length === 0 || oracle.length === 0) {
    throw new ReportInputError("frames.csv must carry liquid and oracle rows");
  }
  const bwPanel: Panel = {
    title: "Transmission bandwidth",
    xLabel: "time (s)",
    yLabel: "Mbps",
    yLabelRight: "loss rate",
    yMin: 0,
    series: [
      { x: bw.rows.map((r) => num(r, "t_s")),
        y: bw.rows.map((r) => num(r, "oracle_mbps")),
        color: "#e08214", label: "optimal retransmission", width: 1.8 },
      { x: bw.rows.map((r) => num(r, "t_s")),
        y: bw.rows.map((r) => num(r, "liquid_mbps")),
        color: "#2166ac", label: "fountain protocol", width: 1.8 },
      { x: bw.rows.map((r) => num(r, "t_s")),
        y: bw.rows.map((r) => num(r, "loss_rate")),
        color: "#b2182b", label: "loss schedule", rightAxis: true },
    ],
  };
  const ol = deliveredSeries(oracle, "latency_ms", "t_avail_ms");
  const fl = deliveredSeries(liquid, "latency_ms", "t_avail_ms");
  const latPanel: Panel = {
    title: "Frame delivery latency",
    xLabel: "frame availability time (s)",
    yLabel: "latency (ms)",
    yMin: 0,
    series: [
      { x: ol.x, y: ol.y, color: "#e08214", label: "optimal retransmission", width: 1.6 },
      { x: fl.x, y: fl.y, color: "#2166ac", label: "fountain protocol", width: 1.6 },
    ],
  };
  const sidecar = {
    kind: "paired",
    protocols: {
      liquid: summarizeSimFrames(frames, "liquid"),
      oracle: summarizeSimFrames(frames, "oracle"),
    },
  };
  return {
    svg: renderPanels([bwPanel, latPanel],
                      "Paired run: fountain protocol vs optimal retransmission"),
    sidecar,
  };
}

export function renderStacked(inputDir: string): RenderResult {
  const frames = readCsv(`${inputDir}/frames.csv`);
  requireColumns(frames, ["frame_id", "t_avail_ms", "latency_ms", "k_symbols",
                          "symbols_sent", "symbols_received", "sent_ratio",
                          "recv_ratio", "loss_rate_scheduled"],
                 `${inputDir}/frames.csv`);
  const rows = frames.rows;
  const t = rows.map((r) => num(r, "t_avail_ms") / 1000);
  const lat = deliveredSeries(rows, "latency_ms", "t_avail_ms");
  const latPanel: Panel = {
    title: "Frame delivery latency",
    xLabel: "time (s)", yLabel: "latency (ms)", yMin: 0,
    series: [{ x: lat.x, y: lat.y, color: "#111", label: "delivery latency" }],
  };
  const recvPanel: Panel = {
    title: "Received encoded data per frame",
    xLabel: "time (s)", yLabel: "received / frame size",
    yLabelRight: "frame size (packets)", yMin: 0,
    series: [
      { x: t, y: rows.map((r) => num(r, "recv_ratio")),
        color: "#2166ac", label: "received ratio" },
      { x: t, y: rows.map((r) => num(r, "k_symbols")),
        color: "#b2182b", label: "frame size", rightAxis: true, step: true },
    ],
  };
  const sentPanel: Panel = {
    title: "Sent encoded data per frame",
    xLabel: "time (s)", yLabel: "sent / frame size",
    yLabelRight: "scheduled loss", yMin: 0,
    series: [
      { x: t, y: rows.map((r) => num(r, "sent_ratio")),
        color: "#1a9850", label: "sent ratio" },
      { x: t, y: rows.map((r) => num(r, "loss_rate_scheduled")),
        color: "#b2182b", label: "loss schedule", rightAxis: true, step: true },
    ],
  };
  return {
    svg: renderPanels([latPanel, recvPanel, sentPanel],
                      "Emulated impaired-network run"),
    sidecar: { kind: "stacked",
               protocols: { liquid: summarizeEmuFrames(frames) } },
  };
}

export function renderBench(inputDir: string): RenderResult {
  const table = readCsv(`${inputDir}/latency_samples.csv`);
  requireColumns(table, ["frame_size", "sample_idx", "latency_ms"],
                 `${inputDir}/latency_samples.csv`);
  const bySize = new Map<number, number[]>();
  for (const r of table.rows) {
    const size = num(r, "frame_size");
    if (!bySize.has(size)) bySize.set(size, []);
    bySize.get(size)!.push(num(r, "latency_ms"));
  }
  const sizes = [...bySize.keys()].sort((a, b) => a - b);
  const colors = ["#2166ac", "#1a9850", "#e08214", "#b2182b", "#542788"];
  const panel: Panel = {
    title: "Per-frame processing latency (sender + receiver, 10% induced loss)",
    xLabel: "frame index", yLabel: "latency (ms)", yMin: 0,
    series: sizes.map((size, i) => {
      const ys = bySize.get(size)!;
      return {
        x: ys.map((_, idx) => idx),
        y: ys,
        color: colors[i % colors.length],
        label: `${Math.round(size / 1000)} KB`,
      };
    }),
  };
  const stats: Record<string, unknown> = {};
  for (const size of sizes) {
    const ys = bySize.get(size)!;
    stats[String(size)] = {
      samples: ys.length,
      median: [...ys].sort((a, b) => a - b)[Math.max(0, Math.ceil(ys.length / 2) - 1)],
      max: Math.max(...ys),
    };
  }
  return {
    svg: renderPanels([panel], "Loopback processing latency"),
    sidecar: { kind: "bench", frame_sizes: stats },
  };
}

export function render(kind: string, inputDir: string): RenderResult {
  switch (kind) {
    case "paired":
      return renderPaired(inputDir);
    case "stacked":
      return renderStacked(inputDir);
    case "bench":
      return renderBench(inputDir);
    default:
      throw new ReportInputError(
        `unknown chart kind '${kind}' (expected paired | stacked | bench)`);
  }
}
