/**
 * Misclassification-vs-budget line chart with one series per method and
 * error bars of one standard error, from a summary CSV
 * (epsilon,method,mean,stderr,trials).
 */

import { CsvTable, SchemaError, columnIndices, requireRows, toNumber } from "./csv.js";
import {
  DEFAULT_MARGIN,
  SERIES_COLORS,
  Scale,
  document as svgDocument,
  el,
  formatTick,
} from "./svg.js";

export interface SummaryPoint {
  epsilon: number;
  mean: number;
  stderr: number;
}

export type SummarySeries = Map<string, SummaryPoint[]>;

export function summarySeries(table: CsvTable): SummarySeries {
  const [epsIdx, methodIdx, meanIdx, stderrIdx] = columnIndices(table, [
    "epsilon", "method", "mean", "stderr",
  ]);
  requireRows(table);
  const series: SummarySeries = new Map();
  for (const row of table.rows) {
    const epsilon = toNumber(row[epsIdx]);
    if (!Number.isFinite(epsilon)) continue; // the no-noise limit has no x position
    const point = {
      epsilon,
      mean: toNumber(row[meanIdx]),
      stderr: toNumber(row[stderrIdx]),
    };
    const method = row[methodIdx];
    if (!series.has(method)) series.set(method, []);
    series.get(method)!.push(point);
  }
  if (series.size === 0) throw new SchemaError("no finite-budget rows to plot");
  for (const points of series.values()) {
    points.sort((a, b) => a.epsilon - b.epsilon);
  }
  return series;
}

/** Recompute the summary from a per-trial results table (oracle cross-check). */
export function recomputeFromTrials(table: CsvTable): SummarySeries {
  const [epsIdx, methodIdx, rateIdx] = columnIndices(table, [
    "epsilon", "method", "misclassification",
  ]);
  requireRows(table);
  const buckets = new Map<string, number[]>();
  for (const row of table.rows) {
    const key = `${row[epsIdx]}|${row[methodIdx]}`;
    if (!buckets.has(key)) buckets.set(key, []);
    buckets.get(key)!.push(toNumber(row[rateIdx]));
  }
  const series: SummarySeries = new Map();
  for (const [key, values] of buckets) {
    const [epsText, method] = key.split("|");
    const epsilon = toNumber(epsText);
    if (!Number.isFinite(epsilon)) continue;
    const mean = values.reduce((a, b) => a + b, 0) / values.length;
    const variance = values.length > 1
      ? values.reduce((a, b) => a + (b - mean) ** 2, 0) / (values.length - 1)
      : 0;
    const stderr = Math.sqrt(variance / values.length);
    if (!series.has(method)) series.set(method, []);
    series.get(method)!.push({ epsilon, mean, stderr });
  }
  for (const points of series.values()) points.sort((a, b) => a.epsilon - b.epsilon);
  return series;
}

/** Largest |summary - recomputation| over matching points. */
export function summaryMismatch(summary: SummarySeries, recomputed: SummarySeries): number {
  let worst = 0;
  for (const [method, points] of summary) {
    const reference = recomputed.get(method);
    if (!reference) continue;
    for (const point of points) {
      const match = reference.find((p) => p.epsilon === point.epsilon);
      if (!match) continue;
      worst = Math.max(worst, Math.abs(match.mean - point.mean),
        Math.abs(match.stderr - point.stderr));
    }
  }
  return worst;
}

export function renderLines(table: CsvTable, width = 760, height = 480): string {
  const series = summarySeries(table);
  const margin = DEFAULT_MARGIN;
  const epsilons = [...series.values()].flatMap((pts) => pts.map((p) => p.epsilon));
  const means = [...series.values()].flatMap((pts) =>
    pts.flatMap((p) => [p.mean - p.stderr, p.mean + p.stderr]));
  const xLo = Math.min(...epsilons);
  const xHi = Math.max(...epsilons);
  const useLog = xLo > 0 && xHi / xLo >= 30;
  const x = new Scale(xLo, xHi, margin.left, width - margin.right, useLog);
  const yLo = Math.max(0, Math.min(...means) - 0.02);
  const yHi = Math.min(1, Math.max(...means) + 0.02);
  const y = new Scale(yLo, yHi, height - margin.bottom, margin.top);

  const parts: string[] = [];
  for (const tick of x.ticks()) {
    const px = x.map(tick);
    parts.push(el("line", {
      x1: px, y1: margin.top, x2: px, y2: height - margin.bottom,
      stroke: "#dddddd", "stroke-width": 1,
    }));
    parts.push(el("text", {
      x: px, y: height - margin.bottom + 18, "text-anchor": "middle",
      "font-size": 12, fill: "#333333",
    }, [], formatTick(tick)));
  }
  for (const tick of y.ticks()) {
    const py = y.map(tick);
    parts.push(el("line", {
      x1: margin.left, y1: py, x2: width - margin.right, y2: py,
      stroke: "#dddddd", "stroke-width": 1,
    }));
    parts.push(el("text", {
      x: margin.left - 8, y: py + 4, "text-anchor": "end",
      "font-size": 12, fill: "#333333",
    }, [], formatTick(tick)));
  }
  parts.push(el("text", {
    x: (margin.left + width - margin.right) / 2, y: height - 10,
    "text-anchor": "middle", "font-size": 13, fill: "#111111",
  }, [], "privacy budget"));
  parts.push(el("text", {
    x: 16, y: (margin.top + height - margin.bottom) / 2,
    "text-anchor": "middle", "font-size": 13, fill: "#111111",
    transform: `rotate(-90 16 ${(margin.top + height - margin.bottom) / 2})`,
  }, [], "misclassification rate"));

  let index = 0;
  for (const [method, points] of series) {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const coords = points.map((p) => `${x.map(p.epsilon).toFixed(2)},${y.map(p.mean).toFixed(2)}`);
    const children: string[] = [];
    for (const p of points) {
      const px = x.map(p.epsilon);
      children.push(el("line", {
        x1: px, y1: y.map(p.mean - p.stderr), x2: px, y2: y.map(p.mean + p.stderr),
        stroke: color, "stroke-width": 1.5,
      }));
      children.push(el("circle", {
        cx: px, cy: y.map(p.mean), r: 3, fill: color,
      }));
    }
    children.push(el("polyline", {
      points: coords.join(" "), fill: "none", stroke: color, "stroke-width": 2,
    }));
    parts.push(el("g", { class: "series", "data-method": method }, children));
    const legendY = margin.top + 18 * index;
    parts.push(el("line", {
      x1: width - margin.right + 10, y1: legendY,
      x2: width - margin.right + 34, y2: legendY,
      stroke: color, "stroke-width": 2,
    }));
    parts.push(el("text", {
      x: width - margin.right + 40, y: legendY + 4, "font-size": 12, fill: "#111111",
    }, [], method));
    index += 1;
  }
  return svgDocument(width, height, parts);
}
