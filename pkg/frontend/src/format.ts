import type { QuerySample } from "./types.js";

export type SortKey = "outlier_score" | "uncertainty" | "id";

/** Stable sort: descending by score column (ascending for id), id tie-break. */
export function sortSamples(samples: QuerySample[], key: SortKey): QuerySample[] {
  const copy = [...samples];
  copy.sort((a, b) => {
    if (key !== "id") {
      const d = b[key] - a[key];
      if (d !== 0) return d;
    }
    return a.id - b.id;
  });
  return copy;
}

/** The `limit` features with the largest standardized magnitude, ties by name. */
export function topFeatures(
  features: Record<string, number>,
  limit = 8,
): Array<{ name: string; value: number }> {
  return Object.entries(features)
    .map(([name, value]) => ({ name, value }))
    .sort((a, b) => Math.abs(b.value) - Math.abs(a.value) || a.name.localeCompare(b.name))
    .slice(0, limit);
}

export function formatScore(x: number): string {
  return x.toFixed(4);
}

export function describeSource(source: QuerySample["source"]): string {
  return { outlierness: "outlier", uncertainty: "uncertain", both: "both" }[source];
}
