/**
 * A figure request: which inputs, which kind of figure, where the image
 * goes. Both CLI tools build one of these and hand it to renderFigure.
 */

import { writeFileSync } from "node:fs";
import { parseGridFile } from "./gridFile.js";
import { parseEnergyFile } from "./energyFile.js";
import { renderEnergySvg, renderFieldSvg } from "./render.js";

export type FigureKind = "contour" | "timeseries";

export interface FigureSpec {
  kind: FigureKind;
  /** One grid file for contour figures; one or more series for overlays. */
  inputs: string[];
  output: string;
  labels?: string[];
  window?: [number, number];
  levels?: number;
  width?: number;
}

/** Parse the inputs, render, and write the image; throws on any parse
 * failure so callers can exit nonzero. */
export function renderFigure(spec: FigureSpec): void {
  if (spec.inputs.length === 0) {
    throw new Error("figure spec names no inputs");
  }
  let svg: string;
  if (spec.kind === "contour") {
    if (spec.inputs.length !== 1) {
      throw new Error("contour figures take exactly one grid file");
    }
    const field = parseGridFile(spec.inputs[0]);
    svg = renderFieldSvg(field, { levels: spec.levels, width: spec.width });
  } else {
    const series = spec.inputs.map((path, idx) =>
      parseEnergyFile(path, spec.labels?.[idx]));
    svg = renderEnergySvg(series, { window: spec.window, width: spec.width });
  }
  writeFileSync(spec.output, svg + "\n");
}
