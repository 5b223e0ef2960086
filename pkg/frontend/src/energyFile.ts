/** Reader for the solver's energy series: `time,energy` header plus rows. */

import { readFileSync } from "node:fs";
import { ParseError } from "./gridFile.js";

export interface EnergySeries {
  label: string;
  times: number[];
  energies: number[];
}

export function parseEnergyFile(path: string, label?: string): EnergySeries {
  const lines = readFileSync(path, "utf8").split(/\r?\n/);
  if ((lines[0] ?? "").trim() !== "time,energy") {
    throw new ParseError(path, 1, `expected 'time,energy' header, got '${lines[0] ?? ""}'`);
  }
  const times: number[] = [];
  const energies: number[] = [];
  for (let k = 1; k < lines.length; k++) {
    const line = lines[k].trim();
    if (!line) continue;
    const parts = line.split(",");
    const t = Number(parts[0]);
    const e = Number(parts[1]);
    if (parts.length !== 2 || !Number.isFinite(t) || !Number.isFinite(e)) {
      throw new ParseError(path, k + 1, `bad series row '${line}'`);
    }
    times.push(t);
    energies.push(e);
  }
  if (times.length === 0) {
    throw new ParseError(path, 1, "series holds no samples");
  }
  return { label: label ?? path, times, energies };
}
