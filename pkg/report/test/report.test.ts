/** End-to-end: generate run CSVs with the Python CLI, render every
 * chart kind, and check the sidecar stats against the CLI's own
 * summary.json to six decimals. */

import { execFileSync } from "child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { beforeAll, describe, expect, it } from "vitest";

import { render, renderPaired, renderStacked } from "../src/charts.js";
import { ReportInputError } from "../src/csv.js";
import { main } from "../src/render.js";

const work = mkdtempSync(join(tmpdir(), "ffreport-"));
const pairedDir = join(work, "paired");
const emuDir = join(work, "emu");
const benchDir = join(work, "bench");

function py(args: string[]): void {
  execFileSync("python3", ["-m", "fountainflow", ...args], {
    stdio: ["ignore", "pipe", "pipe"],
    timeout: 300_000,
  });
}

beforeAll(() => {
  py(["simulate", "--scenario", "synthetic_150mbps", "--seed", "1",
      "--out", pairedDir]);
  py(["emurun", "--scenario", "emulated_9_6mbps", "--seed", "1",
      "--duration-s", "8", "--out", emuDir]);
  py(["bench-loopback", "--frame-size", "31250", "62500", "--frames", "40",
      "--out", benchDir]);
}, 300_000);

function expectClose(a: unknown, b: unknown, path = ""): void {
  if (typeof a === "number" && typeof b === "number") {
    expect(Math.abs(a - b), `${path}: ${a} vs ${b}`).toBeLessThan(1e-6);
    return;
  }
  if (a && b && typeof a === "object" && typeof b === "object") {
    const ka = Object.keys(a as object).sort();
    for (const k of ka) {
      expectClose((a as any)[k], (b as any)[k], `${path}.${k}`);
    }
    return;
  }
  expect(a, path).toEqual(b);
}

describe("paired chart", () => {
  it("renders and its sidecar matches the CLI summary", () => {
    const out = join(work, "charts", "paired.svg");
    expect(main(["--kind", "paired", "--input", pairedDir, "--out", out]))
      .toBe(0);
    expect(existsSync(out)).toBe(true);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain("<svg");
    expect(svg).toContain("Transmission bandwidth");
    expect(svg).toContain("Frame delivery latency");
    const sidecar = JSON.parse(
      readFileSync(join(work, "charts", "paired.stats.json"), "utf-8"));
    const summary = JSON.parse(
      readFileSync(join(pairedDir, "summary.json"), "utf-8"));
    expectClose(sidecar.protocols.liquid, summary.protocols.liquid, "liquid");
    expectClose(sidecar.protocols.oracle, summary.protocols.oracle, "oracle");
  });
});

describe("stacked chart", () => {
  it("renders the three-panel layout with dual axes", () => {
    const out = join(work, "charts", "stacked.svg");
    expect(main(["--kind", "stacked", "--input", emuDir, "--out", out]))
      .toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain("Frame delivery latency");
    expect(svg).toContain("Received encoded data per frame");
    expect(svg).toContain("Sent encoded data per frame");
    expect(svg).toContain("scheduled loss");
    const sidecar = JSON.parse(
      readFileSync(join(work, "charts", "stacked.stats.json"), "utf-8"));
    const summary = JSON.parse(
      readFileSync(join(emuDir, "summary.json"), "utf-8"));
    expectClose(sidecar.protocols.liquid, summary.protocols.liquid, "liquid");
  });
});

describe("bench chart", () => {
  it("renders latency samples per frame size", () => {
    const res = render("bench", benchDir);
    expect(res.svg).toContain("processing latency");
    const sizes = Object.keys((res.sidecar as any).frame_sizes);
    expect(sizes).toEqual(["31250", "62500"]);
  });
});

describe("failure modes", () => {
  it("rejects unknown kinds", () => {
    expect(() => render("pie", pairedDir)).toThrow(ReportInputError);
  });

  it("rejects missing inputs without writing an image", () => {
    const out = join(work, "charts", "missing.svg");
    expect(main(["--kind", "paired", "--input", join(work, "nowhere"),
                 "--out", out])).toBe(2);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects empty CSVs", () => {
    const dir = join(work, "empty");
    execFileSync("mkdir", ["-p", dir]);
    writeFileSync(join(dir, "frames.csv"), "");
    expect(() => renderStacked(dir)).toThrow(/empty/);
  });

  it("rejects header-only CSVs", () => {
    const dir = join(work, "headeronly");
    execFileSync("mkdir", ["-p", dir]);
    writeFileSync(join(dir, "frames.csv"),
                  "frame_id,t_avail_ms,latency_ms\n");
    expect(() => renderStacked(dir)).toThrow(/no data rows/);
  });

  it("names missing columns", () => {
    const dir = join(work, "badcols");
    execFileSync("mkdir", ["-p", dir]);
    writeFileSync(join(dir, "frames.csv"), "a,b\n1,2\n");
    writeFileSync(join(dir, "bandwidth.csv"), "a\n1\n");
    expect(() => renderPaired(dir)).toThrow(/missing column/);
  });
});
