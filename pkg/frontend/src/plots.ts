/**
 * Render aszeta CLI outputs as SVG. Four kinds:
 *
 *  - histogram        normalized samples vs the standard normal density
 *  - qq               sample quantiles vs normal quantiles
 *  - variance-vs-logd second moments from several covariance reports
 *                     against the (2(p-1)/pi^2) log(d |I|) reference
 *  - moment-table     normalized moments vs their Gaussian targets
 *
 * The renderers never recompute statistics beyond presentation-level
 * binning/sorting; every number comes from the CLI's CSV/JSON files.
 */

import { writeFileSync } from "node:fs";

import { expectSubcommand, numericColumn, readCliCsv, readCliJson } from "./csv.js";
import { densityIntegral, histogramBins, mean, normalPdf, normalQuantile,
         sampleStd, HistogramBins } from "./stats.js";
import { circle, document, frame, line, polyline, rect, text } from "./svg.js";

export type PlotKind = "histogram" | "qq" | "variance-vs-logd" | "moment-table";

export interface PlotJob {
  kind: PlotKind;
  /** CSV/JSON files written by the aszeta CLI; meaning depends on kind. */
  inputs: string[];
  /** Output SVG path. */
  output: string;
  /** Sample column for histogram/qq. */
  column?: "S_plus" | "S_minus";
}

export interface RenderResult {
  svg: string;
  bins?: HistogramBins;
  /** qq: [theoretical, empirical]; variance: [log(d*beta), second moment]. */
  points?: Array<[number, number]>;
}

const GAUSSIAN_HEADER = "sample_index,seed,S_plus,S_minus,N_I";

/** Samples from a gaussian-subcommand CSV, normalized for comparison
 * with N(0,1).  With a JSON report alongside, its sigma2 and reported
 * mean are used; otherwise the sample is standardized empirically. */
function normalizedSamples(job: PlotJob): { values: number[]; label: string } {
  if (job.inputs.length === 0) {
    throw new Error("needs a gaussian CSV input");
  }
  const csv = readCliCsv(job.inputs[0]);
  expectSubcommand(csv.config, "gaussian");
  if (csv.header.join(",") !== GAUSSIAN_HEADER) {
    throw new Error(`schema mismatch: header [${csv.header.join(",")}]`);
  }
  if (csv.rows.length === 0) {
    throw new Error("empty input");
  }
  const column = job.column ?? "S_plus";
  const raw = numericColumn(csv, column);
  if (job.inputs.length > 1) {
    const rep = readCliJson(job.inputs[1]);
    expectSubcommand(rep.config, "gaussian");
    const sigma = Math.sqrt(rep.report["sigma2"]);
    const sign = rep.report["signs"][column === "S_plus" ? "plus" : "minus"];
    return { values: raw.map((v) => v / sigma - sign["mean"]),
             label: `${column}/sigma - mean, n=${raw.length}` };
  }
  const m = mean(raw);
  const s = sampleStd(raw);
  return { values: raw.map((v) => (v - m) / s),
           label: `(${column} - mean)/sd, n=${raw.length}` };
}

export function renderHistogram(job: PlotJob): RenderResult {
  const { values, label } = normalizedSamples(job);
  const bins = histogramBins(values);
  const lo = Math.min(bins.edges[0], -4);
  const hi = Math.max(bins.edges[bins.edges.length - 1], 4);
  const peak = Math.max(...bins.densities, normalPdf(0));
  const f = frame([lo, hi], [0, peak * 1.08], label, "density",
                  "normalized statistic vs N(0,1)");
  for (let i = 0; i < bins.counts.length; i++) {
    const x0 = f.x(bins.edges[i]);
    const x1 = f.x(bins.edges[i + 1]);
    const y = f.y(bins.densities[i]);
    f.body.push(rect(x0, y, x1 - x0, f.y(0) - y, "#a6c8e0", ' stroke="white" stroke-width="0.5"'));
  }
  const curve: Array<[number, number]> = [];
  for (let i = 0; i <= 200; i++) {
    const x = lo + ((hi - lo) * i) / 200;
    curve.push([f.x(x), f.y(normalPdf(x))]);
  }
  f.body.push(polyline(curve, "#d62728", ' stroke-width="1.5"'));
  const integral = densityIntegral(bins);
  f.body.push(text(f.x(lo) + 6, f.y(peak * 1.08) + 14,
                   `bins=${bins.counts.length} integral=${integral.toFixed(6)}`));
  const svg = document(f.body);
  writeFileSync(job.output, svg);
  return { svg, bins };
}

export function renderQq(job: PlotJob): RenderResult {
  const { values, label } = normalizedSamples(job);
  const sorted = [...values].sort((a, b) => a - b);
  const n = sorted.length;
  const points: Array<[number, number]> = sorted.map(
    (v, i) => [normalQuantile((i + 0.5) / n), v]);
  const lo = Math.min(points[0][0], sorted[0]);
  const hi = Math.max(points[n - 1][0], sorted[n - 1]);
  const pad = 0.05 * (hi - lo);
  const f = frame([lo - pad, hi + pad], [lo - pad, hi + pad],
                  "normal quantile", label, "Q-Q vs N(0,1)");
  f.body.push(line(f.x(lo), f.y(lo), f.x(hi), f.y(hi), "#888888",
                   ' stroke-dasharray="4,3"'));
  for (const [tq, eq] of points) {
    f.body.push(circle(f.x(tq), f.y(eq), 1.6, "#1f77b4"));
  }
  const svg = document(f.body);
  writeFileSync(job.output, svg);
  return { svg, points };
}

export function renderVarianceTrend(job: PlotJob): RenderResult {
  if (job.inputs.length < 2) {
    throw new Error("needs at least two covariance reports");
  }
  const runs = job.inputs.map((path) => {
    const rep = readCliJson(path);
    expectSubcommand(rep.config, "covariance");
    return rep.report;
  });
  const p = runs[0]["family"]["p"];
  const beta = runs[0]["beta"];
  for (const r of runs) {
    if (r["family"]["p"] !== p || r["beta"] !== beta) {
      throw new Error("schema mismatch: covariance reports disagree on p or beta");
    }
  }
  const points: Array<[number, number]> = runs
    .map((r): [number, number] => [Math.log(r["family"]["d"] * beta), r["second_plus_plus"]])
    .sort((a, b) => a[0] - b[0]);
  const ses = runs.map((r) => r["second_plus_plus_se"] ?? 0);
  const exacts = runs.map((r) => r["second_plus_plus_exact"]);
  const slope = (2 * (p - 1)) / Math.PI ** 2;
  const xs = points.map((pt) => pt[0]);
  const ys = points.map((pt) => pt[1]);
  const xlo = Math.min(...xs) - 0.2;
  const xhi = Math.max(...xs) + 0.2;
  const ylo = 0;
  const yhi = Math.max(...ys.map((y, i) => y + 3 * ses[i]), slope * xhi) * 1.1;
  const f = frame([xlo, xhi], [ylo, yhi], "log(d * beta)", "<S+ S+>",
                  `second moment vs degree (beta=${beta})`);
  f.body.push(polyline([[f.x(xlo), f.y(slope * xlo)], [f.x(xhi), f.y(slope * xhi)]],
                       "#888888", ' stroke-dasharray="4,3"'));
  f.body.push(text(f.x(xhi) - 4, f.y(slope * xhi) - 6,
                   `(2(p-1)/pi^2) log(d beta)`, ' text-anchor="end"'));
  for (let i = 0; i < points.length; i++) {
    const [x, y] = points[i];
    if (ses[i] > 0) {
      f.body.push(line(f.x(x), f.y(y - ses[i]), f.x(x), f.y(y + ses[i]), "#1f77b4"));
    }
    if (typeof exacts[i] === "number") {
      f.body.push(line(f.x(x) - 6, f.y(exacts[i]), f.x(x) + 6, f.y(exacts[i]),
                       "#d62728", ' stroke-width="1.5"'));
    }
    f.body.push(circle(f.x(x), f.y(y), 3, "#1f77b4"));
  }
  const svg = document(f.body);
  writeFileSync(job.output, svg);
  return { svg, points };
}

export function renderMomentTable(job: PlotJob): RenderResult {
  if (job.inputs.length === 0) {
    throw new Error("needs a moments report input");
  }
  const rep = readCliJson(job.inputs[0]);
  expectSubcommand(rep.config, "moments");
  const r = rep.report;
  const body: string[] = [];
  body.push(rect(0, 0, 640, 420, "white"));
  body.push(text(40, 40, `normalized moments  (d=${r["family"]["d"]}, K=${r["K"]}, ` +
                 `beta=${r["beta"]}, mode=${r["mode"]}, n=${r["n_values"]})`));
  const cols = [60, 180, 330, 480];
  const header = ["n", "plus", "minus", "N(0,1) target"];
  header.forEach((h, i) => body.push(text(cols[i], 80, h, ' font-weight="bold"')));
  body.push(line(40, 90, 600, 90, "black"));
  const orders = Object.keys(r["signs"]["plus"]["normalized"]).sort();
  orders.forEach((nKey, rowIdx) => {
    const y = 115 + rowIdx * 26;
    const target = r["signs"]["plus"]["normalized_target"][nKey];
    body.push(text(cols[0], y, nKey));
    body.push(text(cols[1], y, r["signs"]["plus"]["normalized"][nKey].toFixed(6)));
    body.push(text(cols[2], y, r["signs"]["minus"]["normalized"][nKey].toFixed(6)));
    body.push(text(cols[3], y, target.toFixed(6)));
  });
  const yFoot = 115 + orders.length * 26 + 14;
  body.push(text(40, yFoot, `sigma2=${r["sigma2"].toFixed(6)}  ` +
                 `variance main term=${r["main_term_variance"].toFixed(6)}`));
  const svg = document(body);
  writeFileSync(job.output, svg);
  return { svg };
}

export function render(job: PlotJob): RenderResult {
  switch (job.kind) {
    case "histogram":
      return renderHistogram(job);
    case "qq":
      return renderQq(job);
    case "variance-vs-logd":
      return renderVarianceTrend(job);
    case "moment-table":
      return renderMomentTable(job);
    default:
      throw new Error(`unknown plot kind '${(job as PlotJob).kind}'`);
  }
}
