import { Style } from "./style.js";

/** Fixed-point coordinate formatting keeps the output deterministic. */
export function fmt(x: number): string {
  return (Math.round(x * 100) / 100).toFixed(2);
}

export interface LinearScale {
  (x: number): number;
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  return scale;
}

/** Round tick positions: ~n steps of 1/2/5 x 10^k covering the domain. */
export function ticks(domain: [number, number], n = 5): number[] {
  const [lo, hi] = domain;
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

export function tickLabel(t: number): string {
  if (t === 0) return "0";
  const abs = Math.abs(t);
  if (abs >= 1e4 || abs < 1e-3) return t.toExponential(1);
  return String(Math.round(t * 1e6) / 1e6);
}

export interface Curve {
  label: string;
  color: string;
  points: Array<[number, number]>;
  dashed?: boolean;
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  curves: Curve[];
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function curvePath(curve: Curve, sx: LinearScale, sy: LinearScale): string {
  const d = curve.points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(sx(x))},${fmt(sy(y))}`)
    .join("");
  const dash = curve.dashed ? ' stroke-dasharray="5,3"' : "";
  return `<path d="${d}" fill="none" stroke="${curve.color}"${dash}/>`;
}

function extent(
  curves: Curve[],
  pick: (p: [number, number]) => number,
): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const c of curves) {
    for (const p of c.points) {
      const v = pick(p);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function renderPanel(panel: Panel, style: Style, ox: number): string {
  const { margin } = style;
  const w = style.panelWidth;
  const h = style.panelHeight;
  const innerX: [number, number] = [ox + margin.left, ox + w - margin.right];
  const innerY: [number, number] = [h - margin.bottom, margin.top];
  const xDom = extent(panel.curves, (p) => p[0]);
  const yDom = extent(panel.curves, (p) => p[1]);
  const pad = (yDom[1] - yDom[0]) * 0.05;
  const sx = linearScale(xDom, innerX);
  const sy = linearScale([yDom[0] - pad, yDom[1] + pad], innerY);

  const parts: string[] = [];
  parts.push(
    `<text x="${fmt((innerX[0] + innerX[1]) / 2)}" y="${fmt(margin.top - 10)}" text-anchor="middle" font-weight="bold">${esc(panel.title)}</text>`,
  );
  for (const t of ticks(sx.domain)) {
    const x = fmt(sx(t));
    parts.push(
      `<line x1="${x}" y1="${fmt(innerY[0])}" x2="${x}" y2="${fmt(innerY[1])}" stroke="${style.gridColor}"/>`,
      `<text x="${x}" y="${fmt(innerY[0] + 14)}" text-anchor="middle">${esc(tickLabel(t))}</text>`,
    );
  }
  for (const t of ticks(sy.domain)) {
    const y = fmt(sy(t));
    parts.push(
      `<line x1="${fmt(innerX[0])}" y1="${y}" x2="${fmt(innerX[1])}" y2="${y}" stroke="${style.gridColor}"/>`,
      `<text x="${fmt(innerX[0] - 4)}" y="${fmt(sy(t) + 3)}" text-anchor="end">${esc(tickLabel(t))}</text>`,
    );
  }
  parts.push(
    `<line x1="${fmt(innerX[0])}" y1="${fmt(innerY[0])}" x2="${fmt(innerX[1])}" y2="${fmt(innerY[0])}" stroke="${style.axisColor}"/>`,
    `<line x1="${fmt(innerX[0])}" y1="${fmt(innerY[0])}" x2="${fmt(innerX[0])}" y2="${fmt(innerY[1])}" stroke="${style.axisColor}"/>`,
    `<text x="${fmt((innerX[0] + innerX[1]) / 2)}" y="${fmt(h - 8)}" text-anchor="middle">${esc(panel.xLabel)}</text>`,
    `<text transform="translate(${fmt(ox + 14)},${fmt((innerY[0] + innerY[1]) / 2)}) rotate(-90)" text-anchor="middle">${esc(panel.yLabel)}</text>`,
  );
  for (const curve of panel.curves) {
    if (curve.points.length > 0) parts.push(curvePath(curve, sx, sy));
  }
  // legend, top-right corner of the panel
  panel.curves.forEach((curve, i) => {
    const y = margin.top + 6 + i * 13;
    const x = ox + w - margin.right - 86;
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(y)}" x2="${fmt(x + 16)}" y2="${fmt(y)}" stroke="${curve.color}"${curve.dashed ? ' stroke-dasharray="5,3"' : ""}/>`,
      `<text x="${fmt(x + 20)}" y="${fmt(y + 3)}">${esc(curve.label)}</text>`,
    );
  });
  return parts.join("\n");
}

/** Lay panels out left to right in a single deterministic SVG document. */
export function renderFigure(panels: Panel[], style: Style): string {
  const width = style.panelWidth * Math.max(panels.length, 1);
  const body = panels.map((p, i) => renderPanel(p, style, i * style.panelWidth));
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${style.panelHeight}" font-family="${style.fontFamily}" font-size="${style.fontSize}" stroke-width="${style.strokeWidth}">`,
    `<rect width="${width}" height="${style.panelHeight}" fill="white"/>`,
    ...body,
    `</svg>`,
    ``,
  ].join("\n");
}
