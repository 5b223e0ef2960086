/**
 * plot_energy <energy.csv> [more.csv ...] --out <image.svg>
 *             [--window T0 T1] [--label NAME ...]
 *
 * Overlays one curve per input series; --window crops the time axis.
 * Exits nonzero on malformed input, naming the offending line.
 */

import { renderFigure } from "../figureSpec.js";

function usage(): never {
  console.error("usage: plot_energy <energy.csv> [more.csv ...] --out <image.svg> "
    + "[--window T0 T1] [--label NAME ...]");
  process.exit(2);
}

export function main(argv: string[]): number {
  const inputs: string[] = [];
  const labels: string[] = [];
  let out: string | undefined;
  let window: [number, number] | undefined;
  for (let k = 0; k < argv.length; k++) {
    const arg = argv[k];
    if (arg === "--out") out = argv[++k];
    else if (arg === "--label") labels.push(argv[++k]);
    else if (arg === "--window") {
      const t0 = Number(argv[++k]);
      const t1 = Number(argv[++k]);
      if (!Number.isFinite(t0) || !Number.isFinite(t1) || t1 <= t0) usage();
      window = [t0, t1];
    } else if (arg.startsWith("--")) usage();
    else inputs.push(arg);
  }
  if (inputs.length === 0 || !out) usage();
  try {
    renderFigure({ kind: "timeseries", inputs, output: out, labels, window });
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(`plot_energy: ${(err as Error).message}`);
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
