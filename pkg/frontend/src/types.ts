// Server payload shapes for the reopt session API. Every number the UI
// shows comes from these documents; nothing is recomputed client-side.

export interface SolveResultDoc {
  status: string;
  assignment: Record<string, number> | null;
  objective: number | null;
  best_bound: number | null;
  gap: number | null;
  wall_time: number;
  node_count: number;
}

export interface DiffEntryDoc {
  path: string[];
  before: unknown;
  after: unknown;
}

export interface FailureDoc {
  failure_stage: string;
  failure_kind: string;
  failure_message: string;
  repair_instruction: string;
  attempt_history: [string, string, string][];
}

export interface PatchDoc {
  op: string;
  target: unknown;
  scope: unknown;
  update: Record<string, unknown>;
  notes?: string;
}

export interface OutcomeDoc {
  status: "succeeded" | "failed_budget_exhausted";
  applied_action_set: { actions: PatchDoc[] } | null;
  new_state_version: number;
  solution: SolveResultDoc | null;
  attempts_used: number;
  candidate_log: unknown[];
  failure: FailureDoc | null;
}

export interface PlannerOutputDoc {
  edit_summary: string;
  affected_sets: Record<string, string[]>;
  relevant_components: string[];
  candidate_action_sets: { actions: PatchDoc[] }[];
  planning_hints: Record<string, string>;
  intention: string | null;
}

export interface StrategyDoc {
  solve_strategy: string;
  toolbox_plan: string[];
  rationale: string;
  confidence: number | null;
}

export interface StepResponse {
  session_id: string;
  scenario_name: string;
  delta: string;
  outcome: OutcomeDoc;
  planner_output: PlannerOutputDoc | null;
  strategy: StrategyDoc | null;
  diff: DiffEntryDoc[];
  version: number;
  objective: number | null;
  previous_objective: number | null;
}

export interface EventDoc {
  type: "created" | "step";
  ts: string;
  scenario_name?: string;
  version?: number;
  baseline?: SolveResultDoc;
  delta?: string;
  planner_output?: PlannerOutputDoc | null;
  strategy?: StrategyDoc | null;
  diff?: DiffEntryDoc[];
  outcome?: OutcomeDoc;
}

export interface SessionSummary {
  session_id: string;
  scenario_name: string;
  version: number;
  objective: number | null;
  solution: SolveResultDoc;
  families: Record<string, number>;
  created_at: string;
  updated_at: string;
}

export interface CreateSessionResponse {
  session_id: string;
  scenario_name: string;
  version: number;
  objective: number | null;
  baseline: SolveResultDoc;
}

export interface DiffResponse {
  session_id: string;
  from_version: number;
  to_version: number;
  entries: DiffEntryDoc[];
}

export interface HistoryResponse {
  session_id: string;
  events: EventDoc[];
}

export interface ReplayRowDoc {
  prompt_id: string;
  delta: string;
  variant: string;
  status: string;
  strategy: string | null;
  attempts_used: number;
  objective: number | null;
  ref_objective: number | null;
  delta_obj: number | null;
  ref_gap_pct: number | null;
  wall_time: number;
  score: {
    update_correct: boolean;
    prompt_satisfied: boolean;
    first_attempt_success: boolean;
    final_success: boolean;
    failure_modes: string[];
  } | null;
  missing_reference: boolean;
}

export interface ReplayReportDoc {
  meta: Record<string, unknown>;
  aggregates: {
    criteria_counts: Record<string, number>;
    criteria_rates: Record<string, number>;
    failure_mode_counts: Record<string, number>;
    scored_rows: number;
    total_rows: number;
  };
  rows: ReplayRowDoc[];
}
