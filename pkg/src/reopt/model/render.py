"""Deterministic textual rendering of a ModelState for planner prompts."""

from __future__ import annotations

import math

from ..keys import IndexKey
from ..ops import OP_EFFECTS, PATCH_OPS
from .types import (
    ExplicitTerms,
    IndexedSum,
    Literal,
    ModelState,
    RhsSpec,
    Semantic,
    ValueExpr,
)

DEFAULT_INDEX_CAP = 200


def _fmt_key(key: IndexKey) -> str:
    return "(" + ",".join(key) + ")"


def _fmt_num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _fmt_expr(expr: ValueExpr) -> str:
    if isinstance(expr, Literal):
        return _fmt_num(expr.value)
    if expr.key is not None:
        return f"{expr.name}[{_fmt_key(expr.key)}]"
    if expr.project is not None:
        return f"{expr.name}[index positions {list(expr.project)}]"
    return f"{expr.name}[index]"


def _fmt_rhs(rhs: RhsSpec) -> str:
    parts = []
    if rhs.default is not None:
        parts.append(_fmt_expr(rhs.default))
    if rhs.overrides:
        inner = ", ".join(f"{_fmt_key(k)}={_fmt_expr(v)}" for k, v in rhs.overrides.items())
        parts.append(f"overrides {{{inner}}}")
    return " ".join(parts) if parts else "(unset)"


def _meta(desc: str, tags) -> str:
    out = []
    if desc:
        out.append(f"desc: {desc}")
    if tags:
        out.append(f"tags: [{', '.join(sorted(tags))}]")
    return "; ".join(out)


def _capped_lines(items: list[str], cap: int, indent: str = "    ") -> list[str]:
    lines = [indent + s for s in items[:cap]]
    if len(items) > cap:
        lines.append(f"{indent}... ({len(items) - cap} more entries truncated)")
    return lines


def render_for_planner(state: ModelState, index_cap: int = DEFAULT_INDEX_CAP) -> str:
    lines: list[str] = [f"MODEL STATE version={state.version} sense=minimize", ""]

    lines.append("PARAMETERS")
    for p in state.parameters.values():
        meta = _meta(p.description, p.tags)
        if p.kind == "scalar":
            lines.append(f"- {p.name} (scalar) = {_fmt_num(p.value)}" + (f" | {meta}" if meta else ""))
        elif p.kind == "map":
            lines.append(f"- {p.name} (keyed map, {len(p.value)} entries)" + (f" | {meta}" if meta else ""))
            lines.extend(_capped_lines(
                [f"{_fmt_key(k)} = {_fmt_num(v)}" for k, v in p.value.items()], index_cap))
        else:
            lines.append(f"- {p.name} (key list, {len(p.value)} entries)" + (f" | {meta}" if meta else ""))
            lines.extend(_capped_lines([_fmt_key(k) for k in p.value], index_cap))
    if not state.parameters:
        lines.append("(none)")
    lines.append("")

    lines.append("VARIABLE FAMILIES")
    for f in state.variable_families.values():
        lo, hi = f.default_bounds
        meta = _meta(f.description, f.tags)
        lines.append(
            f"- {f.name}: type={f.var_type}, default_bounds=[{_fmt_num(lo)}, {_fmt_num(hi)}], "
            f"{len(f.index_set)} indices" + (f" | {meta}" if meta else ""))
        lines.extend(_capped_lines([_fmt_key(k) for k in f.index_set], index_cap))
        if f.bound_overrides:
            lines.append("    bound overrides:")
            lines.extend(_capped_lines(
                [f"{_fmt_key(k)} -> [{_fmt_num(b[0])}, {_fmt_num(b[1])}]"
                 for k, b in f.bound_overrides.items()], index_cap, indent="      "))
    if not state.variable_families:
        lines.append("(none)")
    lines.append("")

    lines.append("CONSTRAINT FAMILIES")
    for c in state.constraint_families.values():
        meta = _meta(c.description, c.tags)
        lines.append(f"- {c.name}: sense {c.sense}, {len(c.index_set)} rows"
                     + (f" | {meta}" if meta else ""))
        if isinstance(c.lhs, IndexedSum):
            lines.append(
                f"    lhs: sum over {c.lhs.var_family} members whose index positions "
                f"{list(c.lhs.var_positions)} equal the row key, coeff {_fmt_expr(c.lhs.coeff)}")
        elif isinstance(c.lhs, ExplicitTerms):
            lines.append(f"    lhs: explicit terms on {len(c.lhs.rows)} rows")
        elif isinstance(c.lhs, Semantic):
            lines.append(f"    lhs: semantic kind {c.lhs.kind!r} payload {dict(c.lhs.payload)!r}")
        lines.append(f"    rhs: {_fmt_rhs(c.rhs)}")
        lines.extend(_capped_lines([_fmt_key(k) for k in c.index_set], index_cap))
    if not state.constraint_families:
        lines.append("(none)")
    lines.append("")

    lines.append("OBJECTIVE COMPONENTS")
    for o in state.objective_components.values():
        meta = _meta(o.description, o.tags)
        lines.append(f"- {o.name}: weight {_fmt_num(o.weight)}, {len(o.terms)} terms"
                     + (f" | {meta}" if meta else ""))
        lines.extend(_capped_lines(
            [f"{fam}{_fmt_key(idx)} * {_fmt_expr(coeff)}" for fam, idx, coeff in o.terms],
            index_cap))
    if not state.objective_components:
        lines.append("(none)")
    lines.append("")

    if state.entity_registry:
        lines.append("ENTITY LABELS")
        for label, ident in state.entity_registry.items():
            lines.append(f'- "{label}" -> {ident}')
        lines.append("")

    lines.append("ALLOWED PATCH OPERATIONS")
    for op in PATCH_OPS:
        lines.append(f"- {op}: {OP_EFFECTS[op]}")

    return "\n".join(lines) + "\n"
