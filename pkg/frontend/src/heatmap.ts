/**
 * Faceted heatmap of the importance weight from a heatmap CSV
 * (z0,z,epsilon_z,omega): one panel per noise level, observed value on the
 * vertical axis, true value on the horizontal axis, weight as color.
 */

import { CsvTable, SchemaError, columnIndices, requireRows, toNumber } from "./csv.js";
import { Scale, colorRamp, document as svgDocument, el, formatTick } from "./svg.js";

interface HeatCell {
  z0: number;
  z: number;
  omega: number;
}

export function renderHeatmapGrid(table: CsvTable, panelSize = 240): string {
  const [z0Idx, zIdx, epsIdx, omegaIdx] = columnIndices(table, [
    "z0", "z", "epsilon_z", "omega",
  ]);
  requireRows(table);
  const panels = new Map<number, HeatCell[]>();
  for (const row of table.rows) {
    const epsilon = toNumber(row[epsIdx]);
    if (!panels.has(epsilon)) panels.set(epsilon, []);
    panels.get(epsilon)!.push({
      z0: toNumber(row[z0Idx]),
      z: toNumber(row[zIdx]),
      omega: toNumber(row[omegaIdx]),
    });
  }
  if (panels.size === 0) throw new SchemaError("no heatmap cells found");
  const order = [...panels.keys()].sort((a, b) => b - a);

  const margin = { top: 34, right: 16, bottom: 40, left: 52 };
  const columns = Math.min(order.length, 2);
  const gridRows = Math.ceil(order.length / columns);
  const cellW = panelSize + margin.left + margin.right;
  const cellH = panelSize + margin.top + margin.bottom;
  const width = columns * cellW;
  const height = gridRows * cellH + 30;

  const parts: string[] = [];
  order.forEach((epsilon, panelIndex) => {
    const cells = panels.get(epsilon)!;
    const zs = [...new Set(cells.map((c) => c.z))].sort((a, b) => a - b);
    const z0s = [...new Set(cells.map((c) => c.z0))].sort((a, b) => a - b);
    const omegaMax = Math.max(...cells.map((c) => c.omega));
    const omegaMin = Math.min(...cells.map((c) => c.omega));
    const span = omegaMax - omegaMin || 1;

    const originX = (panelIndex % columns) * cellW + margin.left;
    const originY = Math.floor(panelIndex / columns) * cellH + margin.top;
    const x = new Scale(Math.min(...zs), Math.max(...zs), originX, originX + panelSize);
    const y = new Scale(Math.min(...z0s), Math.max(...z0s),
      originY + panelSize, originY);
    const rectW = panelSize / Math.max(1, zs.length - 1);
    const rectH = panelSize / Math.max(1, z0s.length - 1);

    const children: string[] = [];
    for (const cell of cells) {
      children.push(el("rect", {
        x: (x.map(cell.z) - rectW / 2).toFixed(2),
        y: (y.map(cell.z0) - rectH / 2).toFixed(2),
        width: rectW.toFixed(2),
        height: rectH.toFixed(2),
        fill: colorRamp((cell.omega - omegaMin) / span),
      }));
    }
    children.push(el("text", {
      x: originX + panelSize / 2, y: originY - 12, "text-anchor": "middle",
      "font-size": 13, fill: "#111111",
    }, [], `feature budget ${formatTick(epsilon)}`));
    for (const tick of [Math.min(...zs), 0, Math.max(...zs)]) {
      children.push(el("text", {
        x: x.map(tick), y: originY + panelSize + 16, "text-anchor": "middle",
        "font-size": 11, fill: "#333333",
      }, [], formatTick(tick)));
    }
    for (const tick of [Math.min(...z0s), 0, Math.max(...z0s)]) {
      children.push(el("text", {
        x: originX - 8, y: y.map(tick) + 4, "text-anchor": "end",
        "font-size": 11, fill: "#333333",
      }, [], formatTick(tick)));
    }
    children.push(el("text", {
      x: originX + panelSize / 2, y: originY + panelSize + 32,
      "text-anchor": "middle", "font-size": 12, fill: "#111111",
    }, [], "true value"));
    parts.push(el("g", { class: "panel", "data-epsilon-z": epsilon }, children));
  });
  return svgDocument(width, height, parts);
}
