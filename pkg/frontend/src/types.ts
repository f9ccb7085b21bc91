/** Wire types for the labeling API. */

export type RunState = "idle" | "training" | "awaiting_labels" | "done";

export interface Status {
  state: RunState;
  window: number;
}

export interface QuerySample {
  id: number;
  /** Standardized feature values keyed by feature name. */
  features: Record<string, number>;
  outlier_score: number;
  uncertainty: number;
  source: "outlierness" | "uncertainty" | "both";
}

export interface PendingQueries {
  request_id: string | null;
  window?: number;
  samples: QuerySample[];
}

export interface WindowMetrics {
  window: number;
  auc: number | null;
  queried: number;
  pool_size: number;
  new_families: string[];
}

export type LabelValue = "benign" | "attack";

export interface LabelResult {
  accepted: boolean;
  remaining?: number;
  error?: string;
}
