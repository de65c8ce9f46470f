#!/usr/bin/env node
/** ozlab-plot <kind> <csv...> -o out.svg [--no-timestamp]
 *
 * Renders one of the five figure kinds from the experiment driver's staged
 * files. Exit codes: 0 ok, 1 render/schema failure, 2 usage.
 */

import { writeFileSync } from "node:fs";
import { PLOT_KINDS, PlotOptions } from "./plots.js";
import { SchemaError } from "./csv.js";

function usage(): void {
  process.stderr.write(
    `usage: ozlab-plot <${Object.keys(PLOT_KINDS).join("|")}> <input...> -o out.svg [--no-timestamp]\n`,
  );
}

export function main(argv: string[]): number {
  const args = [...argv];
  let out: string | null = null;
  let timestamp = true;
  const positional: string[] = [];
  while (args.length > 0) {
    const a = args.shift() as string;
    if (a === "-o" || a === "--out") {
      out = args.shift() ?? null;
    } else if (a === "--no-timestamp") {
      timestamp = false;
    } else if (a.startsWith("-")) {
      usage();
      return 2;
    } else {
      positional.push(a);
    }
  }
  if (positional.length < 2 || out === null) {
    usage();
    return 2;
  }
  const [kind, ...inputs] = positional;
  const plot = PLOT_KINDS[kind];
  if (!plot) {
    usage();
    return 2;
  }
  const opt: PlotOptions = { timestamp };
  try {
    const svg = plot(inputs, opt);
    writeFileSync(out, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`ozlab-plot: schema mismatch: ${err.message}\n`);
    } else {
      process.stderr.write(`ozlab-plot: ${String(err)}\n`);
    }
    return 1;
  }
  return 0;
}

const invoked = process.argv[1] ?? "";
if (invoked.endsWith("cli.js") || invoked.endsWith("ozlab-plot")) {
  process.exit(main(process.argv.slice(2)));
}
