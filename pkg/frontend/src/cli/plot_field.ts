/**
 * plot_field <field.dat> --out <image.svg> [--levels N] [--width W]
 *
 * Renders a filled-contour image of one solver grid file. Exits nonzero
 * on malformed input, naming the offending line.
 */

import { renderFigure } from "../figureSpec.js";

function usage(): never {
  console.error("usage: plot_field <field.dat> --out <image.svg> [--levels N] [--width W]");
  process.exit(2);
}

export function main(argv: string[]): number {
  const inputs: string[] = [];
  let out: string | undefined;
  let levels: number | undefined;
  let width: number | undefined;
  for (let k = 0; k < argv.length; k++) {
    const arg = argv[k];
    if (arg === "--out") out = argv[++k];
    else if (arg === "--levels") levels = Number(argv[++k]);
    else if (arg === "--width") width = Number(argv[++k]);
    else if (arg.startsWith("--")) usage();
    else inputs.push(arg);
  }
  if (inputs.length !== 1 || !out) usage();
  try {
    renderFigure({ kind: "contour", inputs, output: out, levels, width });
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(`plot_field: ${(err as Error).message}`);
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
