import type { WindowMetrics } from "./types.js";

export interface ChartOptions {
  width?: number;
  height?: number;
  pad?: number;
}

/**
 * Window-AUC timeline as an inline SVG string. Windows that introduced a new
 * attack family get a marker and a label; the y axis is fixed to [0, 1].
 */
export function aucTimelineSvg(metrics: WindowMetrics[], opts: ChartOptions = {}): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 220;
  const pad = opts.pad ?? 32;
  const points = metrics.filter((m) => m.auc !== null);
  if (points.length === 0) {
    return `<svg width="${width}" height="${height}" role="img"><text x="${width / 2}" y="${height / 2}" text-anchor="middle" class="empty">no finished windows yet</text></svg>`;
  }
  const xMin = points[0]!.window;
  const xMax = Math.max(points[points.length - 1]!.window, xMin + 1);
  const x = (w: number) => pad + ((w - xMin) / (xMax - xMin)) * (width - 2 * pad);
  const y = (auc: number) => height - pad - auc * (height - 2 * pad);

  const path = points
    .map((m, i) => `${i === 0 ? "M" : "L"}${x(m.window).toFixed(1)},${y(m.auc!).toFixed(1)}`)
    .join(" ");
  const markers = points
    .filter((m) => m.new_families.length > 0)
    .map(
      (m) =>
        `<circle class="new-family" cx="${x(m.window).toFixed(1)}" cy="${y(m.auc!).toFixed(1)}" r="5"><title>window ${m.window}: ${m.new_families.join(", ")}</title></circle>`,
    )
    .join("");
  const gridlines = [0, 0.5, 1]
    .map(
      (v) =>
        `<line class="grid" x1="${pad}" y1="${y(v)}" x2="${width - pad}" y2="${y(v)}"/>` +
        `<text class="tick" x="${pad - 6}" y="${y(v) + 4}" text-anchor="end">${v}</text>`,
    )
    .join("");
  return (
    `<svg width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" role="img">` +
    gridlines +
    `<path class="auc" d="${path}" fill="none"/>` +
    markers +
    `</svg>`
  );
}
