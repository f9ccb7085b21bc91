import { ApiClient } from "./api.js";
import { aucTimelineSvg } from "./chart.js";
import type { SortKey } from "./format.js";
import { renderQueryTable, renderStatus } from "./render.js";
import type { LabelValue } from "./types.js";

export interface AppElements {
  status: HTMLElement;
  queries: HTMLElement;
  chart: HTMLElement;
}

/** Polls the labeling API and keeps the three panels in sync. */
export class App {
  private sortKey: SortKey = "outlier_score";
  private requestId: string | null = null;
  private labeled = new Set<number>();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly el: AppElements,
    private readonly pollMs = 750,
  ) {
    el.queries.addEventListener("click", (ev) => this.onClick(ev));
  }

  start(): void {
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.pollMs);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  async refresh(): Promise<void> {
    try {
      const [status, pending, metrics] = await Promise.all([
        this.api.status(),
        this.api.pendingQueries(),
        this.api.windowMetrics(),
      ]);
      if (pending.request_id !== this.requestId) {
        this.requestId = pending.request_id;
        this.labeled = new Set();
      }
      const remaining = pending.samples.filter((s) => !this.labeled.has(s.id)).length;
      this.el.status.innerHTML = renderStatus(status, remaining);
      this.el.queries.innerHTML = renderQueryTable(pending, this.labeled, this.sortKey);
      this.el.chart.innerHTML = aucTimelineSvg(metrics);
      if (status.state === "done") this.stop();
    } catch {
      this.el.status.innerHTML = `<span class="state state-error">engine unreachable</span>`;
    }
  }

  private onClick(ev: Event): void {
    const target = ev.target as HTMLElement | null;
    if (!target) return;
    const sort = target.dataset?.sort as SortKey | undefined;
    if (sort) {
      this.sortKey = sort;
      void this.refresh();
      return;
    }
    if (target.classList?.contains("label-btn") && this.requestId !== null) {
      const id = Number(target.dataset.id);
      const label = target.dataset.label as LabelValue;
      void this.submit(id, label);
    }
  }

  async submit(id: number, label: LabelValue): Promise<void> {
    if (this.requestId === null) return;
    const result = await this.api.submitLabel(this.requestId, id, label);
    if (result.accepted) {
      this.labeled.add(id);
      await this.refresh();
    }
  }
}

export function boot(doc: Document): App {
  const api = new ApiClient("");
  const app = new App(api, {
    status: doc.getElementById("status")!,
    queries: doc.getElementById("queries")!,
    chart: doc.getElementById("chart")!,
  });
  app.start();
  return app;
}
