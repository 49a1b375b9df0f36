/**
 * Parser for the solver benchmark summary CSV.
 *
 * The file is the aggregated output of the Python harness: one row per
 * (mode, bit_budget) group with per-metric means and standard errors, a
 * leading `schema` version column, and 17-significant-digit decimals.
 */

export const SUPPORTED_SCHEMA = 1;

export interface SummaryRow {
  schema: number;
  mode: string;
  bitBudget: number;
  values: Record<string, number>;
}

export interface SeriesPoint {
  x: number;
  mean: number;
  stderr: number;
}

export interface Series {
  group: string;
  points: SeriesPoint[];
}

export function parseSummaryCsv(text: string): SummaryRow[] {
  const lines = text.split(/\r?\n/).filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) {
    throw new Error("empty summary CSV");
  }
  const header = lines[0].split(",");
  if (header[0] !== "schema") {
    throw new Error(`summary CSV must start with a schema column, got '${header[0]}'`);
  }
  for (const required of ["mode", "bit_budget"]) {
    if (!header.includes(required)) {
      throw new Error(`summary CSV missing required column '${required}'`);
    }
  }
  if (lines.length === 1) {
    throw new Error("summary CSV has a header but no rows");
  }
  const rows: SummaryRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i} has ${cells.length} cells, header has ${header.length}`);
    }
    const byName: Record<string, string> = {};
    header.forEach((name, j) => (byName[name] = cells[j]));
    const schema = Number(byName["schema"]);
    if (schema !== SUPPORTED_SCHEMA) {
      throw new Error(
        `unsupported schema version ${byName["schema"]} (supported: ${SUPPORTED_SCHEMA})`
      );
    }
    const values: Record<string, number> = {};
    for (const name of header) {
      if (name === "mode") continue;
      const v = Number(byName[name]);
      if (!Number.isNaN(v)) values[name] = v;
    }
    rows.push({
      schema,
      mode: byName["mode"],
      bitBudget: Number(byName["bit_budget"]),
      values,
    });
  }
  return rows;
}

/**
 * Group rows into one series per `group` column value, x = bit budget,
 * y = `<metric>_mean` with `<metric>_stderr` bands. Performs no averaging:
 * the summary file already holds the aggregated numbers.
 */
export function extractSeries(
  rows: SummaryRow[],
  metric: string,
  groupColumn = "mode"
): Series[] {
  const meanCol = `${metric}_mean`;
  const errCol = `${metric}_stderr`;
  const byGroup = new Map<string, SeriesPoint[]>();
  for (const row of rows) {
    const mean = row.values[meanCol];
    if (mean === undefined) {
      throw new Error(`metric column '${meanCol}' not present in summary CSV`);
    }
    const group = groupColumn === "mode" ? row.mode : String(row.values[groupColumn]);
    const pts = byGroup.get(group) ?? [];
    pts.push({ x: row.bitBudget, mean, stderr: row.values[errCol] ?? 0 });
    byGroup.set(group, pts);
  }
  return [...byGroup.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([group, points]) => ({
      group,
      points: points.slice().sort((p, q) => p.x - q.x),
    }));
}
