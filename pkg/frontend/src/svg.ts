/** Tiny SVG document builder — enough for line charts and heatmap grids. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 36, right: 150, bottom: 46, left: 58 };

export const SERIES_COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const XMLNS = "http://www.w3.org/2000/svg";

function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function attrs(pairs: Record<string, string | number>): string {
  return Object.entries(pairs)
    .map(([key, value]) => `${key}="${value}"`)
    .join(" ");
}

export function el(
  tag: string,
  pairs: Record<string, string | number>,
  children: string[] = [],
  text?: string,
): string {
  const open = `<${tag} ${attrs(pairs)}`;
  if (children.length === 0 && text === undefined) return `${open}/>`;
  const body = text !== undefined ? escapeText(text) : children.join("\n");
  return `${open}>${body}</${tag}>`;
}

export function document(width: number, height: number, children: string[]): string {
  return [
    `<svg xmlns="${XMLNS}" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    ...children,
    "</svg>",
  ].join("\n");
}

/** Affine (or log10) map from a data domain onto a pixel range. */
export class Scale {
  constructor(
    readonly lo: number,
    readonly hi: number,
    readonly pixelLo: number,
    readonly pixelHi: number,
    readonly log = false,
  ) {}

  map(value: number): number {
    const [a, b] = this.log
      ? [Math.log10(this.lo), Math.log10(this.hi)]
      : [this.lo, this.hi];
    const v = this.log ? Math.log10(value) : value;
    const t = b === a ? 0.5 : (v - a) / (b - a);
    return this.pixelLo + t * (this.pixelHi - this.pixelLo);
  }

  ticks(count = 5): number[] {
    if (this.log) {
      const lo = Math.ceil(Math.log10(this.lo) - 1e-9);
      const hi = Math.floor(Math.log10(this.hi) + 1e-9);
      const out: number[] = [];
      for (let p = lo; p <= hi; p++) out.push(10 ** p);
      return out.length >= 2 ? out : [this.lo, this.hi];
    }
    const step = (this.hi - this.lo) / (count - 1);
    return Array.from({ length: count }, (_, i) => this.lo + i * step);
  }
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1000 || magnitude < 0.01) return value.toExponential(0);
  return String(Number(value.toPrecision(3)));
}

/** Perceptually ordered color ramp (dark blue to yellow). */
export function colorRamp(t: number): string {
  const stops: [number, number, number][] = [
    [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
  ];
  const clamped = Math.min(1, Math.max(0, t));
  const scaled = clamped * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(scaled));
  const frac = scaled - i;
  const mix = stops[i].map((c, k) => Math.round(c + frac * (stops[i + 1][k] - c)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}
