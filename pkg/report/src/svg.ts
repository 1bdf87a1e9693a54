/** Hand-rolled SVG line charts: panels with one or two Y axes, ticks,
 * legends. Output is deterministic — fixed styles, no randomness. */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label: string;
  width?: number;
  rightAxis?: boolean;
  step?: boolean;
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  yLabelRight?: string;
  series: Series[];
  yMin?: number;
  yMax?: number;
}

const W = 860;
const PANEL_H = 240;
const MARGIN = { left: 64, right: 64, top: 34, bottom: 40 };

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) hi = lo + 1;
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / (n * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const start = Math.ceil(lo / s) * s;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += s) ticks.push(v);
  return ticks;
}

function fmtTick(v: number): string {
  if (Math.abs(v) >= 1000) return v.toFixed(0);
  if (Math.abs(v - Math.round(v)) < 1e-9) return String(Math.round(v));
  return String(Number(v.toPrecision(3)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderPanels(panels: Panel[], heading: string): string {
  const height = MARGIN.top + panels.length * PANEL_H + 8;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${height}" ` +
      `viewBox="0 0 ${W} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${W}" height="${height}" fill="white"/>`,
    `<text x="${W / 2}" y="20" text-anchor="middle" font-size="15" ` +
      `font-weight="bold">${esc(heading)}</text>`,
  );
  panels.forEach((panel, idx) => {
    parts.push(renderPanel(panel, MARGIN.top + idx * PANEL_H));
  });
  parts.push("</svg>");
  return parts.join("\n");
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
}

function renderPanel(panel: Panel, top: number): string {
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = top + 22;
  const y1 = top + PANEL_H - MARGIN.bottom;
  const left = panel.series.filter((s) => !s.rightAxis);
  const right = panel.series.filter((s) => s.rightAxis);
  const allX = panel.series.flatMap((s) => s.x);
  const [xLo, xHi] = extent(allX);
  let [yLo, yHi] = extent(left.flatMap((s) => s.y));
  if (panel.yMin !== undefined) yLo = panel.yMin;
  if (panel.yMax !== undefined) yHi = Math.max(yHi, panel.yMax);
  const [rLo0, rHi] = right.length ? extent(right.flatMap((s) => s.y)) : [0, 1];
  const rLo = Math.min(0, rLo0);

  const sx = (v: number) => x0 + ((v - xLo) / (xHi - xLo || 1)) * (x1 - x0);
  const sy = (v: number) => y1 - ((v - yLo) / (yHi - yLo || 1)) * (y1 - y0);
  const sr = (v: number) => y1 - ((v - rLo) / (rHi - rLo || 1)) * (y1 - y0);

  const out: string[] = [];
  out.push(
    `<text x="${x0}" y="${top + 14}" font-size="13" font-weight="bold">` +
      `${esc(panel.title)}</text>`,
  );
  for (const t of niceTicks(yLo, yHi)) {
    const y = sy(t);
    out.push(
      `<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" stroke="#ddd" stroke-width="1"/>`,
      `<text x="${x0 - 6}" y="${y + 4}" text-anchor="end" font-size="10" fill="#444">${fmtTick(t)}</text>`,
    );
  }
  if (right.length) {
    for (const t of niceTicks(rLo, rHi)) {
      const y = sr(t);
      out.push(
        `<text x="${x1 + 6}" y="${y + 4}" font-size="10" fill="#a33">${fmtTick(t)}</text>`,
      );
    }
  }
  for (const t of niceTicks(xLo, xHi, 8)) {
    const x = sx(t);
    out.push(
      `<line x1="${x}" y1="${y1}" x2="${x}" y2="${y1 + 4}" stroke="#444"/>`,
      `<text x="${x}" y="${y1 + 16}" text-anchor="middle" font-size="10" fill="#444">${fmtTick(t)}</text>`,
    );
  }
  out.push(
    `<rect x="${x0}" y="${y0}" width="${x1 - x0}" height="${y1 - y0}" fill="none" stroke="#444"/>`,
    `<text x="${(x0 + x1) / 2}" y="${y1 + 30}" text-anchor="middle" font-size="11">${esc(panel.xLabel)}</text>`,
    `<text transform="translate(${x0 - 44},${(y0 + y1) / 2}) rotate(-90)" text-anchor="middle" font-size="11">${esc(panel.yLabel)}</text>`,
  );
  if (panel.yLabelRight) {
    out.push(
      `<text transform="translate(${x1 + 48},${(y0 + y1) / 2}) rotate(90)" text-anchor="middle" font-size="11" fill="#a33">${esc(panel.yLabelRight)}</text>`,
    );
  }
  for (const s of panel.series) {
    const scale = s.rightAxis ? sr : sy;
    const pts: string[] = [];
    let prevY: number | null = null;
    for (let i = 0; i < s.x.length; i++) {
      const px = sx(s.x[i]);
      const py = scale(s.y[i]);
      if (s.step && prevY !== null) pts.push(`${px.toFixed(2)},${prevY.toFixed(2)}`);
      pts.push(`${px.toFixed(2)},${py.toFixed(2)}`);
      prevY = py;
    }
    out.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" ` +
        `stroke-width="${s.width ?? 1.4}"/>`,
    );
  }
  let lx = x0 + 10;
  for (const s of panel.series) {
    out.push(
      `<line x1="${lx}" y1="${y0 + 10}" x2="${lx + 18}" y2="${y0 + 10}" stroke="${s.color}" stroke-width="2"/>`,
      `<text x="${lx + 22}" y="${y0 + 14}" font-size="11">${esc(s.label)}</text>`,
    );
    lx += 30 + 7 * s.label.length;
  }
  return out.join("\n");
}
