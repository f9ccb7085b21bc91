import { describe, expect, it } from "vitest";

import { aucTimelineSvg } from "../src/chart.js";
import type { WindowMetrics } from "../src/types.js";

function metric(window: number, auc: number | null, families: string[] = []): WindowMetrics {
  return { window, auc, queried: 10, pool_size: 500 + window * 10, new_families: families };
}

describe("aucTimelineSvg", () => {
  it("renders a placeholder with no finished windows", () => {
    expect(aucTimelineSvg([])).toContain("no finished windows yet");
  });

  it("draws one path point per window with a known AUC", () => {
    const svg = aucTimelineSvg([metric(1, 1.0), metric(2, 0.5), metric(3, null), metric(4, 0.8)]);
    const d = svg.match(/d="([^"]+)"/)?.[1] ?? "";
    expect(d.split(" ")).toHaveLength(3); // null AUC is skipped
    expect(d.startsWith("M")).toBe(true);
  });

  it("marks windows that introduced a new family", () => {
    const svg = aucTimelineSvg([metric(1, 0.9), metric(2, 0.6, ["beta"]), metric(3, 0.95)]);
    expect(svg.match(/class="new-family"/g)).toHaveLength(1);
    expect(svg).toContain("window 2: beta");
  });

  it("pins AUC 1.0 to the top gridline and 0.0 to the bottom", () => {
    const svg = aucTimelineSvg([metric(1, 1.0), metric(2, 0.0)], {
      width: 100,
      height: 100,
      pad: 10,
    });
    expect(svg).toContain("M10.0,10.0 L90.0,90.0");
  });
});
