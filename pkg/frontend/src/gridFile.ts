/**
 * Reader for the solver's grid text format: four header lines
 * (nx, ny, bounds, field name) followed by one grid row per line,
 * bottom row first.
 */

import { readFileSync } from "node:fs";

export interface GridField {
  nx: number;
  ny: number;
  bounds: [number, number, number, number];
  name: string;
  /** Row-major values, values[j][i] with j the y index from the bottom. */
  values: number[][];
}

export class ParseError extends Error {
  constructor(public readonly file: string, public readonly line: number, detail: string) {
    super(`${file}:${line}: ${detail}`);
  }
}

function splitWords(text: string): string[] {
  return text.trim().split(/\s+/).filter((w) => w.length > 0);
}

function finiteNumber(word: string): number | null {
  const v = Number(word);
  return Number.isFinite(v) ? v : null;
}

export function parseGridFile(path: string): GridField {
  const lines = readFileSync(path, "utf8").split(/\r?\n/);
  const expectHeader = (index: number, key: string): string[] => {
    const words = splitWords(lines[index] ?? "");
    if (words[0] !== key) {
      throw new ParseError(path, index + 1, `expected '${key} ...', got '${lines[index] ?? ""}'`);
    }
    return words.slice(1);
  };

  const nxWords = expectHeader(0, "nx");
  const nx = finiteNumber(nxWords[0] ?? "");
  if (nx === null || !Number.isInteger(nx) || nx < 1) {
    throw new ParseError(path, 1, `bad cell count '${nxWords[0]}'`);
  }
  const nyWords = expectHeader(1, "ny");
  const ny = finiteNumber(nyWords[0] ?? "");
  if (ny === null || !Number.isInteger(ny) || ny < 1) {
    throw new ParseError(path, 2, `bad cell count '${nyWords[0]}'`);
  }
  const boundsWords = expectHeader(2, "bounds").map(finiteNumber);
  if (boundsWords.length !== 4 || boundsWords.some((v) => v === null)) {
    throw new ParseError(path, 3, "bounds must hold four numbers");
  }
  const bounds = boundsWords as [number, number, number, number];
  if (bounds[1] <= bounds[0] || bounds[3] <= bounds[2]) {
    throw new ParseError(path, 3, `degenerate bounds [${bounds.join(", ")}]`);
  }
  const nameWords = expectHeader(3, "field");
  const name = nameWords.join(" ") || "field";

  const values: number[][] = [];
  for (let j = 0; j < ny; j++) {
    const lineNo = 4 + j;
    const words = splitWords(lines[lineNo] ?? "");
    if (words.length !== nx) {
      throw new ParseError(path, lineNo + 1,
        `expected ${nx} values in grid row ${j}, found ${words.length}`);
    }
    const row = words.map(finiteNumber);
    if (row.some((v) => v === null)) {
      throw new ParseError(path, lineNo + 1, "non-numeric value in grid row");
    }
    values.push(row as number[]);
  }
  const trailing = lines.slice(4 + ny).filter((l) => l.trim().length > 0);
  if (trailing.length > 0) {
    throw new ParseError(path, 4 + ny + 1, "unexpected data after the grid rows");
  }
  return { nx, ny, bounds, name, values };
}
