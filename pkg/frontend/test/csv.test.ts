import assert from "node:assert/strict";
import { test } from "node:test";

import { extractSeries, parseSummaryCsv } from "../src/csv";

const HEADER =
  "schema,mode,bit_budget,M,B,snr_db,n_trials,n_exact,rsnr_db_mean,rsnr_db_stderr," +
  "support_size_mean,support_size_stderr,iterations_mean,wall_time_s_mean,wall_time_s_stderr";

function row(mode: string, budget: number, mean: number, err: number): string {
  return `1,${mode},${budget},${budget / 4},4,30,50,0,${mean},${err},10,0.5,100,0.2,0.01`;
}

test("parses rows and types", () => {
  const text = [HEADER, row("qvmp", 400, 25.0, 0.5), row("oracle", 400, 40.0, 0.4)].join("\n");
  const rows = parseSummaryCsv(text);
  assert.equal(rows.length, 2);
  assert.equal(rows[0].mode, "qvmp");
  assert.equal(rows[0].bitBudget, 400);
  assert.equal(rows[0].values["rsnr_db_mean"], 25.0);
});

test("refuses unknown schema version", () => {
  const text = [HEADER, row("qvmp", 400, 25.0, 0.5).replace(/^1,/, "7,")].join("\n");
  assert.throws(() => parseSummaryCsv(text), /unsupported schema version 7/);
});

test("refuses empty input and header-only input", () => {
  assert.throws(() => parseSummaryCsv(""), /empty/);
  assert.throws(() => parseSummaryCsv(HEADER), /no rows/);
});

test("refuses files without a leading schema column", () => {
  assert.throws(() => parseSummaryCsv("mode,bit_budget\nqvmp,100"), /schema column/);
});

test("groups series by mode and sorts by budget", () => {
  const text = [
    HEADER,
    row("qvmp", 1000, 30.0, 0.5),
    row("qvmp", 400, 25.0, 0.5),
    row("oracle", 400, 40.0, 0.4),
  ].join("\n");
  const series = extractSeries(parseSummaryCsv(text), "rsnr_db");
  assert.deepEqual(
    series.map((s) => s.group),
    ["oracle", "qvmp"]
  );
  const qvmp = series.find((s) => s.group === "qvmp")!;
  assert.deepEqual(
    qvmp.points.map((p) => p.x),
    [400, 1000]
  );
  // values pass through untouched: no re-averaging of aggregated data
  assert.deepEqual(
    qvmp.points.map((p) => p.mean),
    [25.0, 30.0]
  );
});

test("unknown metric is rejected by name", () => {
  const rows = parseSummaryCsv([HEADER, row("qvmp", 400, 25.0, 0.5)].join("\n"));
  assert.throws(() => extractSeries(rows, "latency"), /latency_mean/);
});
