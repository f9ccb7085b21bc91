import { describeSource, formatScore, sortSamples, topFeatures, type SortKey } from "./format.js";
import type { PendingQueries, QuerySample, Status } from "./types.js";

function escapeHtml(s: string): string {
  return s.replace(/[&<>"']/g, (c) => `&#${c.charCodeAt(0)};`);
}

export function renderStatus(status: Status, remaining: number): string {
  const text = {
    idle: "starting up",
    training: `training on window ${status.window}`,
    awaiting_labels: `window ${status.window}: ${remaining} label${remaining === 1 ? "" : "s"} needed`,
    done: `run complete after window ${status.window}`,
  }[status.state];
  return `<span class="state state-${status.state}">${escapeHtml(text)}</span>`;
}

function featureSummary(sample: QuerySample): string {
  return topFeatures(sample.features)
    .map(
      ({ name, value }) =>
        `<span class="feat" title="standardized value"><b>${escapeHtml(name)}</b> ${formatScore(value)}</span>`,
    )
    .join(" ");
}

export function renderQueryTable(
  pending: PendingQueries,
  labeled: ReadonlySet<number>,
  sortKey: SortKey,
): string {
  if (pending.request_id === null || pending.samples.length === 0) {
    return `<p class="empty">no pending label requests</p>`;
  }
  const rows = sortSamples(pending.samples, sortKey)
    .map((s) => {
      const done = labeled.has(s.id);
      return (
        `<tr class="${done ? "labeled" : "unlabeled"}" data-id="${s.id}">` +
        `<td>${s.id}</td>` +
        `<td>${formatScore(s.outlier_score)}</td>` +
        `<td>${formatScore(s.uncertainty)}</td>` +
        `<td>${describeSource(s.source)}</td>` +
        `<td class="features">${featureSummary(s)}</td>` +
        `<td>` +
        `<button class="label-btn benign" data-id="${s.id}" data-label="benign"${done ? " disabled" : ""}>benign</button>` +
        `<button class="label-btn attack" data-id="${s.id}" data-label="attack"${done ? " disabled" : ""}>attack</button>` +
        `</td></tr>`
      );
    })
    .join("");
  return (
    `<table><thead><tr>` +
    `<th data-sort="id">id</th>` +
    `<th data-sort="outlier_score">outlier score</th>` +
    `<th data-sort="uncertainty">uncertainty</th>` +
    `<th>selected by</th><th>largest standardized features</th><th>label</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}
