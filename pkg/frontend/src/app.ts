// DOM wiring for the session UI. All content comes from the view-model
// builders in render.ts; this file only creates elements and handles
// input state (single in-flight prompt, poll-style refresh on completion).

import {
  createSession,
  getDiff,
  getHistory,
  getSession,
  submitPrompt,
  ApiError,
} from "./api.js";
import {
  criteriaTable,
  failureTable,
  formatNumber,
  sortRowsByGap,
  transcriptFromEvents,
  versionView,
  TranscriptEntry,
} from "./render.js";
import type { ReplayReportDoc } from "./types.js";

let sessionId: string | null = null;
let inFlight = false;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderTranscriptEntry(entry: TranscriptEntry): HTMLElement {
  const card = el("div", `card ${entry.kind} ${entry.status}`);
  if (entry.kind === "baseline") {
    card.appendChild(el("div", "summary", entry.editSummary));
    card.appendChild(el("span", "chip", `objective ${entry.objectiveChip}`));
    return card;
  }
  card.appendChild(el("div", "delta", entry.delta));
  if (entry.editSummary) card.appendChild(el("div", "summary", entry.editSummary));
  if (entry.strategy) {
    const badge = el("span", "badge", entry.strategy);
    badge.title = entry.rationale;
    card.appendChild(badge);
  }
  card.appendChild(el("span", "chip", entry.objectiveChip));
  if (entry.attempts !== null && entry.attempts > 1) {
    card.appendChild(el("span", "chip attempts", `attempts: ${entry.attempts}`));
  }
  for (const patch of entry.patches) {
    card.appendChild(el("div", "patch", patch));
  }
  const diffList = el("ul", "diff");
  for (const row of entry.diff) {
    diffList.appendChild(el("li", `diff-row group-${row.group}`, row.text));
  }
  card.appendChild(diffList);
  if (entry.failure) {
    const banner = el("div", "banner");
    banner.appendChild(el("strong", "", entry.failure.title));
    banner.appendChild(el("div", "", entry.failure.message));
    banner.appendChild(el("div", "repair", entry.failure.repair));
    card.appendChild(banner);
  }
  return card;
}

async function refreshTranscript(): Promise<void> {
  if (!sessionId) return;
  const history = await getHistory(sessionId);
  const pane = byId<HTMLDivElement>("transcript");
  pane.replaceChildren(...transcriptFromEvents(history.events).map(renderTranscriptEntry));
  pane.scrollTop = pane.scrollHeight;
  const summary = await getSession(sessionId);
  byId<HTMLSpanElement>("session-label").textContent =
    `${summary.scenario_name} / ${summary.session_id} — v${summary.version}, ` +
    `objective ${formatNumber(summary.objective)}`;
  const picker = byId<HTMLInputElement>("version-input");
  picker.max = String(summary.version);
}

function setBusy(busy: boolean): void {
  inFlight = busy;
  byId<HTMLTextAreaElement>("delta-input").disabled = busy;
  byId<HTMLButtonElement>("send").disabled = busy;
  byId<HTMLSpanElement>("spinner").style.display = busy ? "inline-block" : "none";
}

async function onCreateSession(): Promise<void> {
  const scenario = byId<HTMLInputElement>("scenario-input").value.trim() || "toy";
  try {
    const created = await createSession(scenario);
    sessionId = created.session_id;
    await refreshTranscript();
  } catch (error) {
    showError(error);
  }
}

async function onSubmitPrompt(): Promise<void> {
  if (!sessionId || inFlight) return;
  const input = byId<HTMLTextAreaElement>("delta-input");
  const delta = input.value.trim();
  if (!delta) return;
  setBusy(true);
  try {
    await submitPrompt(sessionId, delta);
    input.value = "";
  } catch (error) {
    showError(error);
  } finally {
    setBusy(false);
    await refreshTranscript();  // poll-style refresh after completion
  }
}

async function onInspectVersion(): Promise<void> {
  if (!sessionId) return;
  const version = Number(byId<HTMLInputElement>("version-input").value);
  const pane = byId<HTMLDivElement>("inspector");
  try {
    const [diff, summary, history] = await Promise.all([
      getDiff(sessionId, version),
      getSession(sessionId),
      getHistory(sessionId),
    ]);
    const step = history.events.find(
      (event) => event.type === "step" && event.version === version);
    const solution = version === summary.version
      ? summary.solution
      : step?.outcome?.solution ?? null;
    const view = versionView(diff.entries, solution);
    pane.replaceChildren();
    pane.appendChild(el("h3", "", `version ${version - 1} → ${version}`));
    const meta = el("div", "meta",
      `status ${view.status} | objective ${view.objective} | ` +
      `gap ${view.gap} | time ${view.wallTime}`);
    pane.appendChild(meta);
    const diffList = el("ul", "diff");
    for (const row of view.diff) {
      diffList.appendChild(el("li", `diff-row group-${row.group}`, row.text));
    }
    pane.appendChild(diffList);
    const table = el("table", "solution");
    for (const row of view.solution) {
      const tr = el("tr", row.highlighted ? "highlight" : "");
      tr.appendChild(el("td", "", row.key));
      tr.appendChild(el("td", "num", row.value));
      table.appendChild(tr);
    }
    pane.appendChild(table);
  } catch (error) {
    pane.replaceChildren(
      el("div", "banner",
         error instanceof ApiError && error.status === 404
           ? `version ${version} is not committed in this session`
           : String(error)));
  }
}

function renderReport(report: ReplayReportDoc): void {
  const pane = byId<HTMLDivElement>("dashboard");
  pane.replaceChildren();
  if (!report.rows.length) {
    pane.appendChild(el("div", "empty", "empty report"));
    return;
  }
  const criteria = el("table", "criteria");
  for (const row of criteriaTable(report)) {
    const tr = el("tr");
    tr.appendChild(el("td", "", row.criterion));
    tr.appendChild(el("td", "num", `${row.count}/${row.total}`));
    tr.appendChild(el("td", "num", row.rate));
    criteria.appendChild(tr);
  }
  pane.appendChild(el("h3", "", "nested success criteria"));
  pane.appendChild(criteria);

  const failures = el("table", "failures");
  for (const [mode, count] of failureTable(report)) {
    const tr = el("tr", count > 0 ? "nonzero" : "");
    tr.appendChild(el("td", "", mode));
    tr.appendChild(el("td", "num", String(count)));
    failures.appendChild(tr);
  }
  pane.appendChild(el("h3", "", "failure modes"));
  pane.appendChild(failures);

  const rows = el("table", "rows");
  const header = el("tr");
  for (const head of ["prompt", "status", "strategy", "obj", "ref", "gap%"]) {
    header.appendChild(el("th", "", head));
  }
  rows.appendChild(header);
  for (const row of sortRowsByGap(report.rows)) {
    const tr = el("tr");
    tr.appendChild(el("td", "", row.prompt_id));
    tr.appendChild(el("td", "", row.status));
    tr.appendChild(el("td", "", row.strategy ?? "-"));
    tr.appendChild(el("td", "num", formatNumber(row.objective)));
    tr.appendChild(el("td", "num", formatNumber(row.ref_objective)));
    tr.appendChild(el("td", "num",
      row.ref_gap_pct === null ? "-" : row.ref_gap_pct.toFixed(2)));
    rows.appendChild(tr);
  }
  pane.appendChild(el("h3", "", "rows (sorted by gap)"));
  pane.appendChild(rows);
}

function onLoadReport(event: Event): void {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  file.text().then((text) => {
    try {
      renderReport(JSON.parse(text) as ReplayReportDoc);
    } catch {
      byId<HTMLDivElement>("dashboard").replaceChildren(
        el("div", "banner", "not a replay report JSON file"));
    }
  });
}

function showError(error: unknown): void {
  const banner = byId<HTMLDivElement>("global-error");
  banner.textContent = error instanceof ApiError
    ? `request failed (${error.status}): ${JSON.stringify(error.detail)}`
    : String(error);
  banner.style.display = "block";
  setTimeout(() => (banner.style.display = "none"), 6000);
}

export function mount(): void {
  byId<HTMLButtonElement>("create").addEventListener("click", onCreateSession);
  byId<HTMLButtonElement>("send").addEventListener("click", onSubmitPrompt);
  byId<HTMLTextAreaElement>("delta-input").addEventListener("keydown", (event) => {
    if (event.key === "Enter" && (event.ctrlKey || event.metaKey)) onSubmitPrompt();
  });
  byId<HTMLButtonElement>("inspect").addEventListener("click", onInspectVersion);
  byId<HTMLInputElement>("report-file").addEventListener("change", onLoadReport);
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  mount();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", mount);
}
