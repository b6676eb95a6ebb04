export { parseCliCsv, readCliCsv, readCliJson, numericColumn, expectSubcommand } from "./csv.js";
export { mean, sampleStd, normalPdf, normalQuantile, histogramBins, densityIntegral } from "./stats.js";
export type { HistogramBins } from "./stats.js";
export { render, renderHistogram, renderQq, renderVarianceTrend, renderMomentTable } from "./plots.js";
export type { PlotJob, PlotKind, RenderResult } from "./plots.js";
