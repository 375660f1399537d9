/**
 * Render benchmark sweep CSVs to SVG: one panel per game, one colored
 * series per estimator with a median line and a first-to-third-quartile
 * band, error axis log-scaled.
 *
 * Flags: --csv in.csv --out plot.svg [--metric l2_error|objective_ratio]
 *        [--x m|sigma|gamma]
 */

import * as fs from "fs";
import { columnIndex, parseCsv } from "./csv";
import { Band, quartileBand } from "./quantiles";

export interface PlotSpec {
  csvPath: string;
  outPath: string;
  metric: "l2_error" | "objective_ratio";
  xAxis: "m" | "sigma" | "gamma";
}

interface Series {
  estimator: string;
  points: { x: number; band: Band }[];
}

interface Panel {
  game: string;
  series: Series[];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const WIDTH = 360;
const HEIGHT = 300;
const MARGIN = { top: 34, right: 16, bottom: 46, left: 64 };

export function collectPanels(csvText: string, spec: PlotSpec): { panels: Panel[]; skipped: number } {
  const table = parseCsv(csvText);
  const gameCol = columnIndex(table, "game");
  const estCol = columnIndex(table, "estimator");
  const xCol = columnIndex(table, spec.xAxis);
  const metricCol = columnIndex(table, spec.metric);

  let skipped = 0;
  // game -> estimator -> x -> values
  const nest = new Map<string, Map<string, Map<number, number[]>>>();
  for (const row of table.rows) {
    const metricRaw = row[metricCol];
    if (metricRaw === "") {
      skipped += 1;
      continue;
    }
    const value = Number(metricRaw);
    const x = Number(row[xCol]);
    if (!Number.isFinite(value) || !Number.isFinite(x)) {
      skipped += 1;
      continue;
    }
    const byEst = nest.get(row[gameCol]) ?? new Map();
    nest.set(row[gameCol], byEst);
    const byX = byEst.get(row[estCol]) ?? new Map();
    byEst.set(row[estCol], byX);
    const bucket = byX.get(x) ?? [];
    byX.set(x, bucket);
    bucket.push(value);
  }

  const panels: Panel[] = [];
  for (const [game, byEst] of nest) {
    const series: Series[] = [];
    for (const [estimator, byX] of byEst) {
      const points = [...byX.entries()]
        .sort((a, b) => a[0] - b[0])
        .map(([x, values]) => ({ x, band: quartileBand(values) }));
      series.push({ estimator, points });
    }
    panels.push({ game, series });
  }
  return { panels, skipped };
}

type Scale = (value: number) => number;

function makeScale(domain: [number, number], range: [number, number], log: boolean): Scale {
  const [d0, d1] = log ? [Math.log10(domain[0]), Math.log10(domain[1])] : domain;
  const span = d1 - d0 || 1;
  return (value) => {
    const v = log ? Math.log10(value) : value;
    return range[0] + ((v - d0) / span) * (range[1] - range[0]);
  };
}

function fmt(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) return value.toExponential(0);
  return `${Number(value.toPrecision(4))}`;
}

function panelSvg(panel: Panel, spec: PlotSpec, offsetX: number, offsetY: number): string {
  const inner = {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
  const xs = panel.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = panel.series.flatMap((s) => s.points.flatMap((p) => [p.band.q1, p.band.q3, p.band.median]));
  const yPos = ys.filter((v) => v > 0);
  const yFloor = yPos.length ? Math.min(...yPos) : 1e-16;
  const clamp = (v: number) => Math.max(v, yFloor * 0.5);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const logX = xMin > 0 && xMax / Math.max(xMin, 1e-300) >= 20;
  const xScale = makeScale([xMin, xMax === xMin ? xMin + 1 : xMax], [inner.x0, inner.x1], logX);
  const yMax = Math.max(...ys.map(clamp));
  const yScale = makeScale([yFloor * 0.5, yMax * 2], [inner.y0, inner.y1], true);

  const parts: string[] = [];
  parts.push(`<g transform="translate(${offsetX},${offsetY})">`);
  parts.push(
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white" stroke="none"/>`
  );
  parts.push(
    `<text x="${WIDTH / 2}" y="18" text-anchor="middle" font-size="13" font-family="sans-serif">${escapeXml(panel.game)}</text>`
  );
  // frame
  parts.push(
    `<rect x="${inner.x0}" y="${inner.y1}" width="${inner.x1 - inner.x0}" height="${inner.y0 - inner.y1}" fill="none" stroke="#444"/>`
  );
  // y ticks at powers of ten
  const decadeLo = Math.ceil(Math.log10(yFloor * 0.5));
  const decadeHi = Math.floor(Math.log10(yMax * 2));
  for (let d = decadeLo; d <= decadeHi; d++) {
    const yy = yScale(10 ** d);
    parts.push(`<line x1="${inner.x0}" x2="${inner.x1}" y1="${yy}" y2="${yy}" stroke="#ddd"/>`);
    parts.push(
      `<text x="${inner.x0 - 6}" y="${yy + 4}" text-anchor="end" font-size="10" font-family="sans-serif">1e${d}</text>`
    );
  }
  // x ticks at observed values (thin out to at most 8)
  const uniqueX = [...new Set(xs)].sort((a, b) => a - b);
  const step = Math.max(1, Math.ceil(uniqueX.length / 8));
  uniqueX.filter((_, i) => i % step === 0).forEach((x) => {
    const xx = xScale(x);
    parts.push(`<line x1="${xx}" x2="${xx}" y1="${inner.y0}" y2="${inner.y0 + 4}" stroke="#444"/>`);
    parts.push(
      `<text x="${xx}" y="${inner.y0 + 16}" text-anchor="middle" font-size="10" font-family="sans-serif">${fmt(x)}</text>`
    );
  });
  parts.push(
    `<text x="${(inner.x0 + inner.x1) / 2}" y="${HEIGHT - 8}" text-anchor="middle" font-size="11" font-family="sans-serif">${spec.xAxis}</text>`
  );
  parts.push(
    `<text transform="translate(14,${(inner.y0 + inner.y1) / 2}) rotate(-90)" text-anchor="middle" font-size="11" font-family="sans-serif">${spec.metric}</text>`
  );

  panel.series.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const pts = series.points;
    if (pts.length === 0) return;
    const bandPath =
      "M" +
      pts.map((p) => `${xScale(p.x)},${yScale(clamp(p.band.q3))}`).join(" L") +
      " L" +
      [...pts].reverse().map((p) => `${xScale(p.x)},${yScale(clamp(p.band.q1))}`).join(" L") +
      " Z";
    parts.push(`<path d="${bandPath}" fill="${color}" fill-opacity="0.22" stroke="none"/>`);
    const line = pts.map((p) => `${xScale(p.x)},${yScale(clamp(p.band.median))}`).join(" L");
    parts.push(`<path d="M${line}" fill="none" stroke="${color}" stroke-width="1.8"/>`);
    pts.forEach((p) =>
      parts.push(
        `<circle cx="${xScale(p.x)}" cy="${yScale(clamp(p.band.median))}" r="2.4" fill="${color}"/>`
      )
    );
    // legend entry
    const ly = inner.y1 + 12 + idx * 14;
    parts.push(`<line x1="${inner.x1 - 86}" x2="${inner.x1 - 70}" y1="${ly}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(
      `<text x="${inner.x1 - 66}" y="${ly + 3}" font-size="10" font-family="sans-serif">${escapeXml(series.estimator)}</text>`
    );
  });
  parts.push("</g>");
  return parts.join("\n");
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSvg(csvText: string, spec: PlotSpec): { svg: string; skipped: number } {
  const { panels, skipped } = collectPanels(csvText, spec);
  if (panels.length === 0) {
    throw new Error("no plottable rows (metric column empty everywhere?)");
  }
  const perRow = Math.min(3, panels.length);
  const rows = Math.ceil(panels.length / perRow);
  const width = perRow * WIDTH;
  const height = rows * HEIGHT;
  const body = panels
    .map((panel, i) =>
      panelSvg(panel, spec, (i % perRow) * WIDTH, Math.floor(i / perRow) * HEIGHT)
    )
    .join("\n");
  const svg = `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`;
  return { svg, skipped };
}

export function parsePlotArgs(argv: string[]): PlotSpec {
  let csvPath: string | undefined;
  let outPath: string | undefined;
  let metric: PlotSpec["metric"] = "l2_error";
  let xAxis: PlotSpec["xAxis"] = "m";
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${arg}`);
      return argv[i];
    };
    if (arg === "--csv") csvPath = next();
    else if (arg === "--out") outPath = next();
    else if (arg === "--metric") {
      const value = next();
      if (value !== "l2_error" && value !== "objective_ratio") {
        throw new Error(`--metric must be l2_error or objective_ratio`);
      }
      metric = value;
    } else if (arg === "--x") {
      const value = next();
      if (value !== "m" && value !== "sigma" && value !== "gamma") {
        throw new Error(`--x must be m, sigma, or gamma`);
      }
      xAxis = value;
    } else throw new Error(`unknown flag ${arg}`);
  }
  if (!csvPath || !outPath) throw new Error("--csv and --out are required");
  return { csvPath, outPath, metric, xAxis };
}

if (require.main === module) {
  try {
    const spec = parsePlotArgs(process.argv.slice(2));
    const csvText = fs.readFileSync(spec.csvPath, "utf-8");
    const { svg, skipped } = renderSvg(csvText, spec);
    fs.writeFileSync(spec.outPath, svg);
    if (skipped > 0) {
      process.stderr.write(`skipped ${skipped} rows without a ${spec.metric} value\n`);
    }
    process.stderr.write(`wrote ${spec.outPath}\n`);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    process.exit(2);
  }
}
