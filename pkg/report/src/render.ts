/** CLI: render run CSVs into an SVG chart plus a stats sidecar.
 *
 * Usage:
 *   node dist/render.js --kind paired|stacked|bench --input <run dir> --out <chart.svg>
 *
 * The sidecar (<chart>.stats.json) recomputes the summary statistics
 * from the CSVs with the shared definitions; for runs produced by the
 * CLI it must match the run's summary.json to six decimals.
 */

import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";

import { render } from "./charts.js";
import { ReportInputError } from "./csv.js";

function parseArgs(argv: string[]): Record<string, string> {
  const args: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new ReportInputError(`bad argument list near '${key}'`);
    }
    args[key.slice(2)] = argv[i + 1];
  }
  for (const required of ["kind", "input", "out"]) {
    if (!(required in args)) {
      throw new ReportInputError(`missing --${required}`);
    }
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Record<string, string>;
  try {
    args = parseArgs(argv);
    const { svg, sidecar } = render(args.kind, args.input);
    mkdirSync(dirname(args.out), { recursive: true });
    writeFileSync(args.out, svg);
    const sidecarPath = args.out.replace(/\.svg$/, "") + ".stats.json";
    writeFileSync(sidecarPath, JSON.stringify(sidecar, null, 2) + "\n");
    console.log(`wrote ${args.out} and ${sidecarPath}`);
    return 0;
  } catch (err) {
    if (err instanceof ReportInputError) {
      console.error(`report error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  process.exit(main(process.argv.slice(2)));
}
