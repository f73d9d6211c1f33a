"""CPLEX LP text format writer and reader for flattened instances.

The writer is the interop path for cross-checking against external
solvers; the reader exists so exported files can be pulled back in for
differential testing. Flat keys like ``flows(P1,C1)`` are legal LP names;
characters outside the LP charset are replaced with ``_``.
"""

from __future__ import annotations

import math
import re

from ..errors import ParseError
from .types import Instance, InstanceRow, InstanceVar

_NAME_OK = re.compile(r"[A-Za-z0-9!\"#$%&()/,;?@_`'{}|~.]")
_BIG = 1e30  # values at or beyond this magnitude mean "no bound"


def sanitize_name(name: str) -> str:
    out = "".join(ch if _NAME_OK.match(ch) else "_" for ch in name)
    if not out or out[0].isdigit() or out[0] == ".":
        out = "x" + out
    return out


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _terms_str(pairs: list[tuple[float, str]]) -> str:
    parts: list[str] = []
    for coeff, name in pairs:
        if not parts:
            parts.append(f"{_num(coeff)} {name}" if coeff >= 0 else f"- {_num(-coeff)} {name}")
        else:
            sign = "+" if coeff >= 0 else "-"
            parts.append(f"{sign} {_num(abs(coeff))} {name}")
    return " ".join(parts)


def write_lp(instance: Instance, name: str = "reopt_export") -> str:
    names = [sanitize_name(v.key) for v in instance.variables]
    lines = [f"\\ Problem name: {name}", "Minimize"]
    obj_pairs = [(v.objective, names[i]) for i, v in enumerate(instance.variables)
                 if v.objective != 0.0]
    lines.append(" obj: " + (_terms_str(obj_pairs) if obj_pairs else "0 " + names[0] if names else ""))
    lines.append("Subject To")
    sense_map = {"<=": "<=", ">=": ">=", "=": "="}
    for row in instance.rows:
        pairs = [(c, names[pos]) for pos, c in row.coeffs]
        if not pairs and names:
            pairs = [(0.0, names[0])]
        lines.append(
            f" {sanitize_name(row.key)}: {_terms_str(pairs)} {sense_map[row.sense]} {_num(row.rhs)}")
    lines.append("Bounds")
    for i, v in enumerate(instance.variables):
        lo, hi = v.lower, v.upper
        if math.isinf(lo) and math.isinf(hi):
            lines.append(f" {names[i]} free")
        elif math.isinf(hi):
            lines.append(f" {names[i]} >= {_num(lo)}")
        elif math.isinf(lo):
            lines.append(f" -inf <= {names[i]} <= {_num(hi)}")
        elif lo == hi:
            lines.append(f" {names[i]} = {_num(lo)}")
        else:
            lines.append(f" {_num(lo)} <= {names[i]} <= {_num(hi)}")
    generals = [names[i] for i, v in enumerate(instance.variables) if v.var_type == "integer"]
    binaries = [names[i] for i, v in enumerate(instance.variables) if v.var_type == "binary"]
    if generals:
        lines.append("Generals")
        lines.extend(f" {n}" for n in generals)
    if binaries:
        lines.append("Binaries")
        lines.extend(f" {n}" for n in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


_SECTION = re.compile(
    r"^(minimize|maximize|subject to|such that|st|s\.t\.|bounds|generals|general|"
    r"integers|integer|binaries|binary|end)\s*$",
    re.IGNORECASE,
)
_TOKEN = re.compile(r"(<=|>=|=<|=>|[<>=+-]|[0-9.][0-9.eE+-]*|[^\s<>=+-]+)")


def _parse_expr(tokens: list[str], where: str) -> list[tuple[float, str]]:
    """Parse '[+-] [coef] name' sequences until exhausted."""
    out: list[tuple[float, str]] = []
    sign = 1.0
    coeff: float | None = None
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        try:
            value = float(tok)
        except ValueError:
            out.append((sign * (1.0 if coeff is None else coeff), tok))
            sign, coeff = 1.0, None
            continue
        if coeff is not None:
            raise ParseError(f"two consecutive numbers in expression", where)
        coeff = value
    if coeff is not None:
        raise ParseError("dangling coefficient", where)
    return out


def read_lp(text: str) -> Instance:
    """Parse an LP file produced by :func:`write_lp` (plus common variants)."""
    obj: dict[str, float] = {}
    rows: list[tuple[str, list[tuple[float, str]], str, float]] = []
    bounds: dict[str, list[float]] = {}
    vtypes: dict[str, str] = {}
    order: list[str] = []
    seen: set[str] = set()

    def note(name: str):
        if name not in seen:
            seen.add(name)
            order.append(name)

    section = None
    row_counter = 0
    for raw in text.splitlines():
        line = raw.split("\\")[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1).lower()
            if section in ("such that", "st", "s.t."):
                section = "subject to"
            if section in ("general", "integers", "integer"):
                section = "generals"
            if section == "binary":
                section = "binaries"
            if section == "end":
                break
            continue
        if section == "minimize" or section == "maximize":
            body = line.split(":", 1)[1] if ":" in line else line
            sign = -1.0 if section == "maximize" else 1.0
            for c, name in _parse_expr(_TOKEN.findall(body), "objective"):
                note(name)
                obj[name] = obj.get(name, 0.0) + sign * c
        elif section == "subject to":
            if ":" in line:
                rname, body = line.split(":", 1)
                rname = rname.strip()
            else:
                rname, body = f"r{row_counter}", line
            row_counter += 1
            toks = _TOKEN.findall(body)
            sense_pos = next((i for i, t in enumerate(toks) if t in ("<=", ">=", "=", "<", ">", "=<", "=>")), None)
            if sense_pos is None:
                raise ParseError("constraint without sense", rname)
            sense = {"<": "<=", ">": ">=", "=<": "<=", "=>": ">="}.get(toks[sense_pos], toks[sense_pos])
            lhs = _parse_expr(toks[:sense_pos], rname)
            try:
                rhs = float("".join(toks[sense_pos + 1:]))
            except ValueError:
                raise ParseError("non-numeric rhs", rname) from None
            for _, name in lhs:
                note(name)
            rows.append((rname, lhs, sense, rhs))
        elif section == "bounds":
            toks = _TOKEN.findall(line)
            if len(toks) == 2 and toks[1].lower() == "free":
                note(toks[0])
                bounds[toks[0]] = [-math.inf, math.inf]
            elif len(toks) == 3:
                name, op, v = (toks[0], toks[1], toks[2])
                if op not in ("<=", ">=", "=", "<", ">"):
                    raise ParseError(f"bad bounds line {line!r}", "bounds")
                note(name)
                b = bounds.setdefault(name, [0.0, math.inf])
                val = float(v)
                if op in ("<=", "<"):
                    b[1] = val
                elif op in (">=", ">"):
                    b[0] = val
                else:
                    b[0] = b[1] = val
            elif len(toks) == 5:
                lo, _, name, _, hi = toks
                note(name)
                lo_v = -math.inf if lo.lstrip("-").lower() in ("inf", "infinity", "1e30") and lo.startswith("-") else float(lo) if lo.lower() not in ("inf", "infinity") else math.inf
                hi_v = math.inf if hi.lower() in ("inf", "infinity") else float(hi)
                if abs(lo_v) >= _BIG:
                    lo_v = -math.inf if lo_v < 0 else math.inf
                if abs(hi_v) >= _BIG:
                    hi_v = math.inf if hi_v > 0 else -math.inf
                bounds[name] = [lo_v, hi_v]
            else:
                raise ParseError(f"bad bounds line {line!r}", "bounds")
        elif section in ("generals", "binaries"):
            for name in line.split():
                note(name)
                vtypes[name] = "integer" if section == "generals" else "binary"

    variables = []
    pos = {}
    for name in order:
        vtype = vtypes.get(name, "continuous")
        default_hi = 1.0 if vtype == "binary" else math.inf
        lo, hi = bounds.get(name, [0.0, default_hi])
        pos[name] = len(variables)
        variables.append(InstanceVar(name, vtype, lo, hi, obj.get(name, 0.0)))
    out_rows = []
    for rname, lhs, sense, rhs in rows:
        coeffs: dict[int, float] = {}
        for c, name in lhs:
            coeffs[pos[name]] = coeffs.get(pos[name], 0.0) + c
        out_rows.append(InstanceRow(rname, tuple(sorted(coeffs.items())), sense, rhs))
    return Instance(variables=tuple(variables), rows=tuple(out_rows))
