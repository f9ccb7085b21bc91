import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readdirSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import type { LabelValue, WindowMetrics } from "../src/types.js";

// End-to-end: drive a real engine process through the HTTP wire protocol only,
// answering its label queries with ground truth read from the data directory,
// and check the run matches a simulated-oracle run of the same configuration.

const ENGINE = ["-m", "flowsentry.cli"];
const FAST = ["--n", "6", "--seed", "4", "--max-epochs", "8", "--patience", "2", "--k", "20"];
const PORT = 8900 + Math.floor(Math.random() * 500); // avoid clashes with stale runs

const root = mkdtempSync(join(tmpdir(), "flowsentry-e2e-"));
const dataDir = join(root, "data");
let serveProc: ChildProcess | null = null;

function runEngine(args: string[]): Promise<number> {
  return new Promise((resolve, reject) => {
    const proc = spawn("python3", [...ENGINE, ...args], { stdio: "ignore" });
    proc.on("error", reject);
    proc.on("exit", (code) => resolve(code ?? -1));
  });
}

/** Ids are assigned sequentially across the sorted window files, starting at 0. */
function loadTruth(dir: string): Map<number, LabelValue> {
  const truth = new Map<number, LabelValue>();
  let id = 0;
  const windowDir = join(dir, "windows");
  for (const file of readdirSync(windowDir).sort()) {
    const lines = readFileSync(join(windowDir, file), "utf8").trim().split("\n");
    for (const line of lines.slice(1)) {
      const label = line.slice(line.lastIndexOf(",") + 1).trim();
      truth.set(id, label.toUpperCase() === "BENIGN" ? "benign" : "attack");
      id += 1;
    }
  }
  return truth;
}

function readReport(outDir: string): Array<Record<string, unknown>> {
  return readFileSync(join(outDir, "report.jsonl"), "utf8")
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line));
}

async function answerUntilDone(
  api: ApiClient,
  truth: Map<number, LabelValue>,
  engineAlive: () => boolean,
): Promise<WindowMetrics[]> {
  const deadline = Date.now() + 180_000;
  let metrics: WindowMetrics[] = [];
  while (Date.now() < deadline) {
    // exit-code assertions happen in the caller; a dead engine ends the loop
    if (!engineAlive()) return metrics;
    let status;
    try {
      status = await api.status();
      metrics = await api.windowMetrics();
    } catch {
      await new Promise((r) => setTimeout(r, 100));
      continue;
    }
    if (status.state === "done") return metrics;
    if (status.state === "awaiting_labels") {
      const pending = await api.pendingQueries();
      if (pending.request_id !== null) {
        for (const sample of pending.samples) {
          const label = truth.get(sample.id);
          expect(label).toBeDefined();
          const result = await api.submitLabel(pending.request_id, sample.id, label!);
          expect(result.accepted).toBe(true);
        }
        continue;
      }
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("engine did not finish within the deadline");
}

beforeAll(async () => {
  expect(await runEngine(["prepare", "--synthetic", "--seed", "3", "--out", dataDir])).toBe(0);
}, 60_000);

afterAll(() => {
  serveProc?.kill();
});

describe("interactive engine over the wire protocol", () => {
  it("matches a simulated-oracle run when answered with ground truth", async () => {
    const simOut = join(root, "sim");
    expect(
      await runEngine(["run", "--data", dataDir, "--out", simOut, ...FAST]),
    ).toBe(0);

    const liveOut = join(root, "live");
    let alive = true;
    const exited = new Promise<number>((resolve) => {
      serveProc = spawn(
        "python3",
        [...ENGINE, "serve", "--data", dataDir, "--out", liveOut, "--port", String(PORT), ...FAST],
        { stdio: "ignore" },
      );
      serveProc.on("exit", (code) => {
        alive = false;
        resolve(code ?? -1);
      });
    });

    const api = new ApiClient(`http://127.0.0.1:${PORT}`);
    const truth = loadTruth(dataDir);
    const metrics = await answerUntilDone(api, truth, () => alive);

    expect(metrics.length).toBeGreaterThan(0);
    expect(metrics.some((m) => m.new_families.length > 0)).toBe(true);

    expect(await exited).toBe(0);

    const sim = readReport(simOut);
    const live = readReport(liveOut);
    expect(live.length).toBe(sim.length);
    for (let i = 0; i < sim.length - 1; i++) {
      expect(live[i]).toEqual(sim[i]); // per-window lines identical
    }
    expect(live[live.length - 1]!.total_queried).toBe(sim[sim.length - 1]!.total_queried);
  }, 240_000);
});
