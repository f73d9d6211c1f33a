"""Prompt assembly for the planner and selector agents.

Assembly is pure: identical inputs produce identical requests. The user
message carries the rendered model and the delta; a repair attempt
prepends the repair prelude and the structured failure bullets.
"""

from __future__ import annotations

from typing import Optional

from ..patch.schema import op_schema_text
from .types import ChatRequest

PLANNER_SYSTEM_INSTRUCTION = """You are a reoptimization planner. Use the deterministic model representation to interpret the requested change and propose candidate model edits. Return JSON only. Use candidate_action_sets as the canonical output format.

Each candidate_action_set is one executable plan; put all coordinated edits for a single plan in the same action set. Each item must be a JSON object with actions=[...]; the patch list key inside each item must be actions. Each patch object must use the canonical keys op, target, scope, update, and optional notes. Return multiple candidate action sets only when they are genuinely different alternative plans, and do not duplicate the same edits in both grouped and flat forms.

Patch payloads must be executable as written: use concrete ids and numeric literals for indices, row labels, and values whenever the model representation provides enough information. Do not emit pseudo-code, formulas, set names, or symbolic placeholders inside patch indices or values. For keyed parameter edits, place the concrete sub-index in update.key. For numeric requests phrased as "increase by", "decrease by", or other additive changes, use update.delta instead of overwriting with update.value. For materialized_linear constraint families, use matching concrete row ids in lhs_spec.rows and rhs_spec, and concrete executable variable indices in every term. If the representation explicitly exposes a compact problem-specific semantic lhs_spec.kind, that semantic payload may be used instead of materializing every row term. If a valid executable patch cannot be expressed, return empty candidate lists rather than a symbolic or guessed placeholder patch.

Required JSON keys:
edit_summary (short free-form summary of the requested edit);
affected_sets (object mapping entity or set labels to identifiers mentioned or strongly implied by the delta, or {} if none);
relevant_components (list of model component names);
candidate_action_sets (list of executable candidate plans, each {actions: [...]});
planning_hints (optional planner hints such as edit_scope='local|structural' or expected_reuse='high|low')."""

REPAIR_PRELUDE = ("This is a fresh repair attempt for the same user request from a fresh "
                  "planning pass. Preserve the user's intent, not the previous implementation "
                  "details. Use the runtime feedback below only to avoid the previous failure "
                  "mode. The items below are runtime feedback from earlier attempts in this "
                  "same run.")

SELECTOR_SYSTEM_INSTRUCTION = """You choose the fastest safe reoptimization solve strategy. Return JSON only.

Pick exactly one solve strategy from the allowed list. Do not invent toolbox items or unsupported strategies. Toolbox plans are executable in this runtime and must match the chosen solve strategy.

Prefer warm+tuned over warm alone when both warm reuse and tuned solving are available and the edit looks reuse-friendly. Prefer warm reuse for local edits when a reusable solution exists but tuned solving is unavailable or unnecessary. Prefer tuned or scratch for structural edits when warm reuse looks fragile.

Required JSON keys: solve_strategy, toolbox_plan, rationale. Optional JSON key: confidence as a number in [0,1]."""

DELTA_MARKER = "User request (delta):"


def render_repair_context(record) -> str:
    """Bullet entries from a failure record (duck-typed to avoid coupling)."""
    lines = [
        f"- failure_stage: {record.failure_stage}",
        f"- failure_kind: {record.failure_kind}",
        f"- failure_message: {record.failure_message}",
    ]
    if getattr(record, "repair_instruction", ""):
        lines.append(f"- repair_instruction: {record.repair_instruction}")
    for i, (stage, kind, message) in enumerate(getattr(record, "attempt_history", ()) or (), 1):
        lines.append(f"- attempt {i} failure: stage={stage}, kind={kind}, message={message}")
    return "\n".join(lines)


def assemble_planner_prompt(render: str, delta: str, repair=None,
                            framing: Optional[str] = None,
                            op_schemas: Optional[str] = None,
                            model: str = "default",
                            temperature: float = 0.0,
                            max_tokens: int = 4096,
                            timeout: float = 60.0) -> ChatRequest:
    system_parts = [PLANNER_SYSTEM_INSTRUCTION]
    if framing:
        system_parts.append(framing)
    system_parts.append("Allowed patch operations and payload schemas:\n"
                        + (op_schemas if op_schemas is not None else op_schema_text()))
    user_parts = []
    if repair is not None:
        user_parts.append(REPAIR_PRELUDE + "\n" + render_repair_context(repair))
    user_parts.append(render)
    user_parts.append(f"{DELTA_MARKER}\n{delta}")
    return ChatRequest(
        system="\n\n".join(system_parts),
        user="\n\n".join(user_parts),
        model=model,
        temperature=temperature,
        max_tokens=max_tokens,
        timeout=timeout,
    )


def assemble_selector_prompt(action_sets, catalog, hints=None,
                             prior_available: bool = False,
                             model: str = "default",
                             temperature: float = 0.0,
                             max_tokens: int = 1024,
                             timeout: float = 60.0) -> ChatRequest:
    import json

    lines = ["Allowed solve strategies:"]
    for entry in catalog.entries:
        if entry.available:
            lines.append(f"- {entry.name}: {entry.description}")
    lines.append("")
    lines.append(f"Prior solution available: {'yes' if prior_available else 'no'}")
    if hints:
        lines.append("")
        lines.append("Planner hints:")
        for key in sorted(hints):
            lines.append(f"- {key}: {hints[key]}")
    lines.append("")
    lines.append("Normalized candidate action sets:")
    lines.append(json.dumps([a.to_doc() for a in action_sets], indent=2))
    return ChatRequest(
        system=SELECTOR_SYSTEM_INSTRUCTION,
        user="\n".join(lines),
        model=model,
        temperature=temperature,
        max_tokens=max_tokens,
        timeout=timeout,
    )
