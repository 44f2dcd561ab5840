/**
 * Marginal-distortion curves from a tv CSV (d,epsilon_z,tv_estimate,
 * n_samples): one line per dimension over the budget grid.
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

export function renderTvCurves(table: CsvTable, width = 720, height = 460): string {
  const [dIdx, epsIdx, tvIdx] = columnIndices(table, ["d", "epsilon_z", "tv_estimate"]);
  requireRows(table);
  const series = new Map<number, { epsilon: number; tv: number }[]>();
  for (const row of table.rows) {
    const d = toNumber(row[dIdx]);
    if (!series.has(d)) series.set(d, []);
    series.get(d)!.push({ epsilon: toNumber(row[epsIdx]), tv: toNumber(row[tvIdx]) });
  }
  if (series.size === 0) throw new SchemaError("no curves found");
  const dims = [...series.keys()].sort((a, b) => a - b);
  for (const points of series.values()) points.sort((a, b) => a.epsilon - b.epsilon);

  const margin = DEFAULT_MARGIN;
  const epsilons = [...series.values()].flatMap((pts) => pts.map((p) => p.epsilon));
  const xLo = Math.min(...epsilons);
  const xHi = Math.max(...epsilons);
  const x = new Scale(xLo, xHi, margin.left, width - margin.right,
    xLo > 0 && xHi / xLo >= 30);
  const y = new Scale(0, 1, height - margin.bottom, margin.top);

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
  }, [], "feature budget"));
  parts.push(el("text", {
    x: 16, y: (margin.top + height - margin.bottom) / 2,
    "text-anchor": "middle", "font-size": 13, fill: "#111111",
    transform: `rotate(-90 16 ${(margin.top + height - margin.bottom) / 2})`,
  }, [], "estimated distortion"));

  dims.forEach((d, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const points = series.get(d)!;
    const coords = points
      .map((p) => `${x.map(p.epsilon).toFixed(2)},${y.map(p.tv).toFixed(2)}`)
      .join(" ");
    const children = [
      el("polyline", { points: coords, fill: "none", stroke: color, "stroke-width": 2 }),
      ...points.map((p) => el("circle", {
        cx: x.map(p.epsilon), cy: y.map(p.tv), r: 3, fill: color,
      })),
    ];
    parts.push(el("g", { class: "series", "data-dimension": d }, children));
    const legendY = margin.top + 18 * index;
    parts.push(el("line", {
      x1: width - margin.right + 10, y1: legendY,
      x2: width - margin.right + 34, y2: legendY,
      stroke: color, "stroke-width": 2,
    }));
    parts.push(el("text", {
      x: width - margin.right + 40, y: legendY + 4, "font-size": 12, fill: "#111111",
    }, [], `d = ${d}`));
  });
  return svgDocument(width, height, parts);
}
