#!/usr/bin/env node
/**
 * Render a benchmark summary CSV into a figure file.
 *
 * Usage:
 *   quantcs-plot --input summary.csv --metric rsnr_db --out figure.svg \
 *       [--group mode] [--title T] [--x-label X] [--y-label Y]
 *
 * The output format follows the file extension; SVG is the supported
 * vector format. The file is only written after rendering succeeds.
 */

import * as fs from "fs";
import * as path from "path";

import { extractSeries, parseSummaryCsv } from "./csv";
import { renderFigure } from "./figure";

interface CliArgs {
  input: string;
  metric: string;
  out: string;
  group: string;
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

function parseArgs(argv: string[]): CliArgs {
  const args: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${key}'`);
    }
    args[key.slice(2)] = value;
  }
  for (const required of ["input", "metric", "out"]) {
    if (!(required in args)) {
      throw new Error(`missing required flag --${required}`);
    }
  }
  return {
    input: args["input"],
    metric: args["metric"],
    out: args["out"],
    group: args["group"] ?? "mode",
    title: args["title"],
    xLabel: args["x-label"],
    yLabel: args["y-label"],
  };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  const ext = path.extname(args.out).toLowerCase();
  if (ext !== ".svg") {
    console.error(`error: unsupported output format '${ext || "(none)"}'; supported: .svg`);
    return 1;
  }
  let svg: string;
  try {
    const text = fs.readFileSync(args.input, "utf8");
    const rows = parseSummaryCsv(text);
    const series = extractSeries(rows, args.metric, args.group);
    svg = renderFigure(series, {
      title: args.title,
      xLabel: args.xLabel ?? "bit budget",
      yLabel: args.yLabel ?? args.metric,
    });
  } catch (err) {
    // render errors must not leave a partial output file behind
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  fs.writeFileSync(args.out, svg);
  console.log(`wrote ${args.out}`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
