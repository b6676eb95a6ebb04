#!/usr/bin/env node
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { render, PlotJob, PlotKind } from "./plots.js";

const KINDS: PlotKind[] = ["histogram", "qq", "variance-vs-logd", "moment-table"];

const USAGE = `usage: aszeta-plots --kind <${KINDS.join("|")}> \\
    --input FILE [--input FILE ...] --output OUT.svg [--column S_plus|S_minus]

Inputs are CSV/JSON files written by the aszeta CLI:
  histogram, qq      gaussian CSV (optionally followed by the gaussian JSON)
  variance-vs-logd   two or more covariance JSON reports
  moment-table       one moments JSON report`;

export function main(argv: string[]): number {
  let values;
  try {
    values = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        input: { type: "string", multiple: true },
        output: { type: "string" },
        column: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    }).values;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  const kind = values.kind as PlotKind | undefined;
  if (!kind || !KINDS.includes(kind) || !values.input?.length || !values.output) {
    console.error(USAGE);
    return 1;
  }
  if (values.column && values.column !== "S_plus" && values.column !== "S_minus") {
    console.error(`error: unknown column '${values.column}'`);
    return 1;
  }
  const job: PlotJob = {
    kind,
    inputs: values.input,
    output: values.output,
    column: values.column as PlotJob["column"],
  };
  try {
    render(job);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  console.log(`wrote ${job.output}`);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
