import { fileURLToPath } from "node:url";

import { describe, expect, test } from "vitest";

import { numericColumn, parseCliCsv, readCliCsv, readCliJson } from "../src/csv.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`../fixtures/${name}`, import.meta.url));

describe("parseCliCsv", () => {
  test("reads the golden gaussian CSV", () => {
    const csv = readCliCsv(fixture("gaussian.csv"));
    expect(csv.config.subcommand).toBe("gaussian");
    expect(csv.config.samples).toBe(2000);
    expect(csv.header).toEqual(["sample_index", "seed", "S_plus", "S_minus", "N_I"]);
    expect(csv.rows).toHaveLength(2000);
  });

  test("numeric column extraction", () => {
    const csv = readCliCsv(fixture("gaussian.csv"));
    const xs = numericColumn(csv, "S_plus");
    expect(xs).toHaveLength(2000);
    expect(xs.every(Number.isFinite)).toBe(true);
    expect(numericColumn(csv, "sample_index")[0]).toBe(0);
  });

  test("rejects empty input", () => {
    expect(() => parseCliCsv("")).toThrow(/empty input/);
  });

  test("rejects a file without the config comment", () => {
    expect(() => parseCliCsv("a,b\n1,2\n")).toThrow(/# config/);
  });

  test("rejects ragged rows", () => {
    const text = '# config {"subcommand": "gaussian"}\na,b\n1,2,3\n';
    expect(() => parseCliCsv(text)).toThrow(/schema mismatch/);
  });

  test("rejects unknown columns", () => {
    const csv = readCliCsv(fixture("gaussian.csv"));
    expect(() => numericColumn(csv, "nope")).toThrow(/no column 'nope'/);
  });
});

describe("readCliJson", () => {
  test("reads a covariance report", () => {
    const rep = readCliJson(fixture("covariance_d41.json"));
    expect(rep.config.subcommand).toBe("covariance");
    expect(rep.report.family.d).toBe(41);
    expect(typeof rep.report.second_plus_plus).toBe("number");
  });

  test("rejects json without the config/report envelope", () => {
    expect(() => readCliJson(fixture("gaussian.csv"))).toThrow();
  });
});
