import {
  asNumber,
  distinct,
  GAP_COLUMNS,
  LOSS_COLUMNS,
  readCsv,
  Row,
  TRAJECTORY_COLUMNS,
} from "./csv.js";
import { BadPlotSpec } from "./errors.js";
import { Style } from "./style.js";
import { Curve, Panel, renderFigure } from "./svg.js";

export const FIGURE_KINDS = [
  "alpha_trajectories",
  "loss_curves",
  "accuracy_curves",
  "gap_vs_bound",
  "depth_panel",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface PlotSpec {
  kind: FigureKind;
  /** Input CSV paths; most kinds take one, depth_panel takes one per model. */
  inputs: string[];
  /** Column whose distinct values become panels (default: one panel). */
  panelBy?: string;
  output: string;
  title?: string;
}

function color(style: Style, i: number): string {
  return style.palette[i % style.palette.length];
}

/** Series key -> sorted (x, y) points. Every number comes from the CSV. */
function series(
  rows: Row[],
  keyOf: (r: Row) => string,
  x: string,
  y: string,
): Map<string, Array<[number, number]>> {
  const out = new Map<string, Array<[number, number]>>();
  for (const row of rows) {
    if (row[y] === "" || row[y] === undefined) continue;
    const key = keyOf(row);
    if (!out.has(key)) out.set(key, []);
    out.get(key)!.push([asNumber(row, x), asNumber(row, y)]);
  }
  for (const pts of out.values()) pts.sort((a, b) => a[0] - b[0]);
  return out;
}

function panelsOf(rows: Row[], spec: PlotSpec): Array<[string, Row[]]> {
  if (!spec.panelBy) return [["", rows]];
  return distinct(rows, spec.panelBy).map((v) => [
    `${spec.panelBy}=${v}`,
    rows.filter((r) => r[spec.panelBy!] === v),
  ]);
}

function trajectoryPanels(spec: PlotSpec, style: Style): Panel[] {
  const rows = readCsv(spec.inputs[0], TRAJECTORY_COLUMNS).filter(
    (r) => r.component !== "",
  );
  return panelsOf(rows, spec).map(([name, group]) => {
    const curves: Curve[] = [];
    const byKey = series(
      group,
      (r) => (r.layer === "" ? `${r.algo} c${r.component}` : `${r.algo} c${r.component} l${r.layer}`),
      "step_or_time",
      "alpha",
    );
    let i = 0;
    for (const [label, points] of byKey) {
      curves.push({ label, color: color(style, i), points });
      i += 1;
    }
    return {
      title: spec.title ?? `coefficients ${name}`.trim(),
      xLabel: "step or time",
      yLabel: "alpha",
      curves,
    };
  });
}

function lossPanels(spec: PlotSpec, style: Style): Panel[] {
  const rows = readCsv(spec.inputs[0], LOSS_COLUMNS).filter((r) => r.loss !== "");
  return panelsOf(rows, spec).map(([name, group]) => {
    const byKey = series(
      group,
      (r) => `${r.algo} class ${r.class_spectral_index || r.class_user_index}`,
      "step_or_time",
      "loss",
    );
    const curves: Curve[] = [];
    let i = 0;
    for (const [label, points] of byKey) {
      curves.push({ label, color: color(style, i), points });
      i += 1;
    }
    return {
      title: spec.title ?? `per-class loss ${name}`.trim(),
      xLabel: "step or time",
      yLabel: "loss",
      curves,
    };
  });
}

function accuracyPanels(spec: PlotSpec, style: Style): Panel[] {
  const rows = readCsv(spec.inputs[0], LOSS_COLUMNS).filter(
    (r) => r.accuracy !== "",
  );
  return panelsOf(rows, spec).map(([name, group]) => {
    const byKey = series(group, (r) => r.algo, "class_user_index", "accuracy");
    const curves: Curve[] = [];
    let i = 0;
    for (const [label, points] of byKey) {
      curves.push({ label, color: color(style, i), points });
      i += 1;
    }
    return {
      title: spec.title ?? `per-class accuracy ${name}`.trim(),
      xLabel: "class (user index)",
      yLabel: "accuracy",
      curves,
    };
  });
}

function gapPanels(spec: PlotSpec, style: Style): Panel[] {
  const rows = readCsv(spec.inputs[0], GAP_COLUMNS);
  const theorems = distinct(rows, "theorem");
  return theorems.map((theorem, i) => {
    const group = rows.filter((r) => r.theorem === theorem);
    const gap: Curve = {
      label: "gap",
      color: color(style, i),
      points: group.map((r) => [asNumber(r, "step_or_time"), asNumber(r, "gap")]),
    };
    const bound: Curve = {
      label: "bound",
      color: style.axisColor,
      dashed: true,
      points: group.map((r) => [asNumber(r, "step_or_time"), asNumber(r, "bound")]),
    };
    return {
      title: theorem,
      xLabel: "t",
      yLabel: "loss gap",
      curves: [gap, bound],
    };
  });
}

function depthPanels(spec: PlotSpec, style: Style): Panel[] {
  // One panel per input CSV (e.g. linear vs bilinear closed forms).
  return spec.inputs.map((path, i) => {
    const rows = readCsv(path, TRAJECTORY_COLUMNS).filter((r) => r.component !== "");
    const byKey = series(
      rows,
      (r) => `${r.algo} c${r.component}`,
      "step_or_time",
      "alpha",
    );
    const curves: Curve[] = [];
    let j = 0;
    for (const [label, points] of byKey) {
      curves.push({ label, color: color(style, j), points });
      j += 1;
    }
    return {
      title: spec.title ? `${spec.title} (${i + 1})` : path.split("/").pop() ?? path,
      xLabel: "step or time",
      yLabel: "alpha",
      curves,
    };
  });
}

/** Build the SVG for a plot spec. Pure: CSV bytes in, SVG string out. */
export function renderSvg(spec: PlotSpec, style: Style): { svg: string; warning?: string } {
  if (!FIGURE_KINDS.includes(spec.kind)) {
    throw new BadPlotSpec(`unknown figure kind ${JSON.stringify(spec.kind)}`);
  }
  if (!spec.inputs || spec.inputs.length === 0) {
    throw new BadPlotSpec("plot spec needs at least one input CSV");
  }
  let panels: Panel[];
  switch (spec.kind) {
    case "alpha_trajectories":
      panels = trajectoryPanels(spec, style);
      break;
    case "loss_curves":
      panels = lossPanels(spec, style);
      break;
    case "accuracy_curves":
      panels = accuracyPanels(spec, style);
      break;
    case "gap_vs_bound":
      panels = gapPanels(spec, style);
      break;
    case "depth_panel":
      panels = depthPanels(spec, style);
      break;
  }
  let warning: string | undefined;
  if (panels.length === 0 || panels.every((p) => p.curves.length === 0)) {
    warning = "no data rows; rendering a blank panel";
    if (panels.length === 0) {
      panels = [
        {
          title: spec.title ?? "(empty)",
          xLabel: "",
          yLabel: "",
          curves: [],
        },
      ];
    }
  }
  return { svg: renderFigure(panels, style), warning };
}
