import type { LabelResult, LabelValue, PendingQueries, Status, WindowMetrics } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the four labeling-API endpoints. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(this.base + path);
    if (!resp.ok) throw new Error(`GET ${path} failed: ${resp.status}`);
    return (await resp.json()) as T;
  }

  status(): Promise<Status> {
    return this.getJson<Status>("/api/status");
  }

  pendingQueries(): Promise<PendingQueries> {
    return this.getJson<PendingQueries>("/api/queries/pending");
  }

  windowMetrics(): Promise<WindowMetrics[]> {
    return this.getJson<WindowMetrics[]>("/api/metrics/windows");
  }

  async submitLabel(requestId: string, id: number, label: LabelValue): Promise<LabelResult> {
    const resp = await this.fetchImpl(this.base + "/api/labels", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ request_id: requestId, id, label }),
    });
    const body = (await resp.json()) as LabelResult;
    if (!resp.ok && body.error === undefined) {
      throw new Error(`POST /api/labels failed: ${resp.status}`);
    }
    return body;
  }
}
