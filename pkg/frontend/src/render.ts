// Pure view-model builders. Everything here is a deterministic function of
// server payloads, so the transcript and inspector views can be
// snapshot-tested without a DOM; app.ts only turns these into elements.

import type {
  DiffEntryDoc,
  EventDoc,
  FailureDoc,
  ReplayReportDoc,
  ReplayRowDoc,
  SolveResultDoc,
  StepResponse,
} from "./types.js";

export function formatNumber(value: number | null | undefined): string {
  if (value === null || value === undefined) return "-";
  if (Number.isInteger(value)) return String(value);
  const rounded = Math.round(value * 1e6) / 1e6;
  return Number.isInteger(rounded) ? String(rounded) : String(rounded);
}

function formatValue(value: unknown): string {
  if (value === null || value === undefined) return "(none)";
  if (typeof value === "number") return formatNumber(value);
  if (Array.isArray(value)) return `[${value.map(formatValue).join(", ")}]`;
  if (typeof value === "object") return "(definition)";
  return String(value);
}

export function objectiveChip(
  previous: number | null | undefined,
  next: number | null | undefined,
): string {
  return `${formatNumber(previous)} → ${formatNumber(next)}`;
}

export interface DiffRow {
  group: string; // state path prefix: parameters, variable_families, ...
  label: string; // path below the group, e.g. "supply.P1"
  text: string;  // full display line, e.g. "supply.P1: 20 → 0"
}

const GROUPS = new Set([
  "parameters",
  "variable_families",
  "constraint_families",
  "objective_components",
  "entity_registry",
]);

export function diffRows(entries: DiffEntryDoc[]): DiffRow[] {
  return entries.map((entry) => {
    const [head, ...rest] = entry.path;
    const group = GROUPS.has(head) ? head : head;
    const label = rest.length ? rest.join(".") : head;
    const text = `${label}: ${formatValue(entry.before)} → ${formatValue(entry.after)}`;
    return { group, label, text };
  });
}

/** Flat variable keys whose bounds or family this diff touched; the
 * version inspector highlights these in the solution table. */
export function touchedVariables(entries: DiffEntryDoc[]): Set<string> {
  const touched = new Set<string>();
  for (const entry of entries) {
    const [head, family, field, key] = entry.path;
    if (head === "variable_families" && field === "bounds" && key) {
      touched.add(`${family}(${key})`);
    }
  }
  return touched;
}

export interface SolutionRow {
  key: string;
  value: string;
  highlighted: boolean;
}

export function solutionRows(
  solution: SolveResultDoc | null,
  highlight: Set<string> = new Set(),
  activeOnly = true,
): SolutionRow[] {
  if (!solution || !solution.assignment) return [];
  return Object.entries(solution.assignment)
    .filter(([key, value]) => !activeOnly || Math.abs(value) > 1e-9 || highlight.has(key))
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([key, value]) => ({
      key,
      value: formatNumber(value),
      highlighted: highlight.has(key),
    }));
}

export interface VersionView {
  diff: DiffRow[];
  solution: SolutionRow[];
  status: string;
  objective: string;
  gap: string;
  wallTime: string;
}

export function versionView(
  entries: DiffEntryDoc[],
  solution: SolveResultDoc | null,
): VersionView {
  const highlight = touchedVariables(entries);
  return {
    diff: diffRows(entries),
    solution: solutionRows(solution, highlight),
    status: solution?.status ?? "-",
    objective: formatNumber(solution?.objective),
    gap: solution?.gap == null ? "-" : formatNumber(solution.gap),
    wallTime: solution ? `${solution.wall_time.toFixed(3)}s` : "-",
  };
}

export interface FailureBanner {
  title: string;     // "[stage/kind]"
  message: string;
  repair: string;
}

export function failureBanner(failure: FailureDoc): FailureBanner {
  return {
    title: `[${failure.failure_stage}/${failure.failure_kind}]`,
    message: failure.failure_message,
    repair: failure.repair_instruction,
  };
}

export interface TranscriptEntry {
  kind: "baseline" | "step";
  version: number | null;
  delta: string;
  editSummary: string;
  strategy: string;
  rationale: string;
  status: string;
  attempts: number | null;
  objectiveChip: string;
  diff: DiffRow[];
  patches: string[];
  failure: FailureBanner | null;
}

function patchLine(patch: { op: string; target: unknown; scope: unknown }): string {
  const parts = [patch.op];
  if (typeof patch.target === "string") parts.push(patch.target);
  else if (patch.target) parts.push(JSON.stringify(patch.target));
  if (Array.isArray(patch.scope)) parts.push(`(${patch.scope.join(",")})`);
  return parts.join(" ");
}

/** The chat transcript is a pure function of the server event log; entries
 * appear in event-log order with no client-side reordering. */
export function transcriptFromEvents(events: EventDoc[]): TranscriptEntry[] {
  const transcript: TranscriptEntry[] = [];
  let previousObjective: number | null = null;
  for (const event of events) {
    if (event.type === "created") {
      const objective = event.baseline?.objective ?? null;
      transcript.push({
        kind: "baseline",
        version: event.version ?? 0,
        delta: "",
        editSummary: `baseline solve of ${event.scenario_name ?? "scenario"}`,
        strategy: "",
        rationale: "",
        status: event.baseline?.status ?? "-",
        attempts: null,
        objectiveChip: formatNumber(objective),
        diff: [],
        patches: [],
        failure: null,
      });
      previousObjective = objective;
      continue;
    }
    const outcome = event.outcome ?? null;
    const succeeded = outcome?.status === "succeeded";
    const objective = outcome?.solution?.objective ?? null;
    transcript.push({
      kind: "step",
      version: event.version ?? null,
      delta: event.delta ?? "",
      editSummary: event.planner_output?.edit_summary ?? "",
      strategy: event.strategy?.solve_strategy ?? "",
      rationale: event.strategy?.rationale ?? "",
      status: outcome?.status ?? "-",
      attempts: outcome?.attempts_used ?? null,
      objectiveChip: succeeded
        ? objectiveChip(previousObjective, objective)
        : formatNumber(previousObjective),
      diff: diffRows(event.diff ?? []),
      patches: (outcome?.applied_action_set?.actions ?? []).map(patchLine),
      failure: outcome?.failure ? failureBanner(outcome.failure) : null,
    });
    if (succeeded && objective !== null) previousObjective = objective;
  }
  return transcript;
}

export function stepToTranscriptTail(step: StepResponse): TranscriptEntry {
  return transcriptFromEvents([
    {
      type: "step",
      ts: "",
      delta: step.delta,
      planner_output: step.planner_output,
      strategy: step.strategy,
      diff: step.diff,
      outcome: step.outcome,
      version: step.version,
    },
  ])[0];
}

// ---------------------------------------------------------------------------
// replay dashboard
// ---------------------------------------------------------------------------

export const CRITERIA = [
  "update_correct",
  "prompt_satisfied",
  "first_attempt_success",
  "final_success",
] as const;

export interface CriteriaRow {
  criterion: string;
  count: number;
  total: number;
  rate: string;
}

export function criteriaTable(report: ReplayReportDoc): CriteriaRow[] {
  const { criteria_counts, scored_rows, criteria_rates } = report.aggregates;
  return CRITERIA.map((criterion) => ({
    criterion,
    count: criteria_counts[criterion],
    total: scored_rows,
    rate: (criteria_rates[criterion] * 100).toFixed(1) + "%",
  }));
}

export function failureTable(report: ReplayReportDoc): [string, number][] {
  return Object.entries(report.aggregates.failure_mode_counts);
}

export function sortRowsByGap(rows: ReplayRowDoc[], descending = true): ReplayRowDoc[] {
  const value = (row: ReplayRowDoc) =>
    row.ref_gap_pct === null ? Number.NEGATIVE_INFINITY : row.ref_gap_pct;
  return [...rows].sort((a, b) =>
    descending ? value(b) - value(a) : value(a) - value(b));
}
