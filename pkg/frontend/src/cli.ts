#!/usr/bin/env node
/**
 * nbturbo-plot: render CER-vs-Eb/N0 figures from simulator CSV output.
 *
 * Usage:
 *   nbturbo-plot --curve "label=path.csv" [--curve ...]
 *                [--bound "label=path.csv" ...]
 *                --out figure.svg [--tidy data.csv] [--title "..."]
 */

import { writeFileSync } from "node:fs";

import { CsvError } from "./csv.js";
import { CurveSet, loadBounds, loadCurve } from "./model.js";
import { renderSvg } from "./svg.js";
import { tidyCsv } from "./tidy.js";

interface Args {
  curves: { label: string; path: string }[];
  bounds: { label: string; path: string }[];
  out?: string;
  tidy?: string;
  title: string;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = { curves: [], bounds: [], title: "" };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const need = (): string => {
      const v = argv[++i];
      if (v === undefined) throw new Error(`missing value for ${flag}`);
      return v;
    };
    switch (flag) {
      case "--curve":
      case "--bound": {
        const spec = need();
        const eq = spec.indexOf("=");
        if (eq <= 0) throw new Error(`${flag} expects "label=path"`);
        const entry = { label: spec.slice(0, eq), path: spec.slice(eq + 1) };
        (flag === "--curve" ? args.curves : args.bounds).push(entry);
        break;
      }
      case "--out":
        args.out = need();
        break;
      case "--tidy":
        args.tidy = need();
        break;
      case "--title":
        args.title = need();
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (args.curves.length === 0) throw new Error("at least one --curve is required");
  if (!args.out) throw new Error("--out is required");
  if (!args.out.endsWith(".svg")) throw new Error("output format: only .svg is supported");
  return args;
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`usage error: ${(e as Error).message}`);
    return 2;
  }
  try {
    const set: CurveSet = {
      curves: args.curves.map((c) => loadCurve(c.label, c.path)),
      bounds: args.bounds.map((b) => loadBounds(b.label, b.path)),
    };
    writeFileSync(args.out!, renderSvg(set, args.title));
    if (args.tidy) {
      writeFileSync(args.tidy, tidyCsv(set));
    }
    console.error(`wrote ${args.out}${args.tidy ? ` and ${args.tidy}` : ""}`);
    return 0;
  } catch (e) {
    if (e instanceof CsvError) {
      console.error(`input error: ${e.message}`);
      return 2;
    }
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(run(process.argv.slice(2)));
}
