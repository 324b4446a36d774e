#!/usr/bin/env node
import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname } from "node:path";
import { FIGURE_KINDS, PlotSpec, renderSvg } from "./figures.js";
import { BadPlotSpec, SchemaMismatch } from "./errors.js";
import { DEFAULT_STYLE, Style } from "./style.js";

function loadSpec(path: string): { spec: PlotSpec; style: Style } {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (e) {
    throw new BadPlotSpec(`cannot read plot spec ${path}: ${(e as Error).message}`);
  }
  const obj = raw as Partial<PlotSpec> & { style?: Partial<Style> };
  if (typeof obj.kind !== "string" || !(FIGURE_KINDS as readonly string[]).includes(obj.kind)) {
    throw new BadPlotSpec(`spec.kind must be one of ${FIGURE_KINDS.join(", ")}`);
  }
  if (!Array.isArray(obj.inputs) || obj.inputs.some((p) => typeof p !== "string")) {
    throw new BadPlotSpec("spec.inputs must be a list of CSV paths");
  }
  if (typeof obj.output !== "string" || obj.output.length === 0) {
    throw new BadPlotSpec("spec.output must be the output SVG path");
  }
  const style: Style = { ...DEFAULT_STYLE, ...(obj.style ?? {}) };
  return {
    spec: {
      kind: obj.kind as PlotSpec["kind"],
      inputs: obj.inputs as string[],
      output: obj.output,
      panelBy: obj.panelBy,
      title: obj.title,
    },
    style,
  };
}

export function main(argv: string[]): number {
  if (argv[0] !== "render" || argv[1] !== "--spec" || !argv[2]) {
    console.error("usage: speclab-figures render --spec PATH");
    return 2;
  }
  try {
    const { spec, style } = loadSpec(argv[2]);
    const { svg, warning } = renderSvg(spec, style);
    if (warning) console.warn(`warning: ${warning}`);
    mkdirSync(dirname(spec.output), { recursive: true });
    writeFileSync(spec.output, svg);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (e) {
    if (e instanceof BadPlotSpec) {
      console.error(`spec error: ${e.message}`);
      return 2;
    }
    if (e instanceof SchemaMismatch) {
      console.error(`schema error: ${e.message}`);
      return 1;
    }
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
