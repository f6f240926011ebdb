"""Deterministic CLP(FD)-style program text for a workbook.

The emitted program is an export, never executed here. Output is a pure
function of the workbook: variable names are cell addresses, domains come
first in row-major order (auxiliaries after, in allocation order), then
the constraints in lowering order, then a first-fail labeling directive.
"""

from __future__ import annotations

from ..fd import (
    AllDifferent,
    CountRel,
    Domain,
    FloorDivMod,
    Implication,
    LinearRel,
    OccursAtLeastOnce,
    Relop,
    TableIn,
)
from ..sheet import Workbook
from .lower import VarMap, lower

_FD_OP = {
    Relop.EQ: "#=",
    Relop.NE: "#\\=",
    Relop.LT: "#<",
    Relop.LE: "#=<",
    Relop.GT: "#>",
    Relop.GE: "#>=",
}

_MIRROR = {
    Relop.EQ: Relop.EQ,
    Relop.NE: Relop.NE,
    Relop.LT: Relop.GT,
    Relop.LE: Relop.GE,
    Relop.GT: Relop.LT,
    Relop.GE: Relop.LE,
}


def _render_domain(dom: Domain) -> str:
    if dom.is_empty():
        return "1..0"
    parts = []
    for lo, hi in dom.intervals:
        parts.append(str(lo) if lo == hi else f"{lo}..{hi}")
    return "\\/".join(parts)


def _render_terms(terms, names) -> str:
    out = []
    for coeff, var in terms:
        mag = abs(coeff)
        body = names[var] if mag == 1 else f"{mag}*{names[var]}"
        if not out:
            out.append(body if coeff > 0 else f"-{body}")
        else:
            out.append(("+" if coeff > 0 else "-") + body)
    return "".join(out)


def _render_linear(rel: LinearRel, names) -> str:
    terms = rel.expr.terms
    const = rel.expr.constant
    relop = rel.relop
    if not terms:
        return f"0 {_FD_OP[relop]} {-const}"
    # keep the lowest-numbered variable's coefficient positive
    if terms[0][0] < 0:
        terms = tuple((-c, v) for c, v in terms)
        const = -const
        relop = _MIRROR[relop]
    return f"{_render_terms(terms, names)} {_FD_OP[relop]} {-const}"


def _render_spec(spec, names) -> list[str]:
    if isinstance(spec, LinearRel):
        return [_render_linear(spec, names)]
    if isinstance(spec, AllDifferent):
        return ["all_different([%s])" % ",".join(names[v] for v in spec.vars)]
    if isinstance(spec, CountRel):
        return [
            "count(%d,[%s],%s,%d)"
            % (
                spec.value,
                ",".join(names[v] for v in spec.vars),
                _FD_OP[spec.relop],
                spec.bound,
            )
        ]
    if isinstance(spec, OccursAtLeastOnce):
        cells = ",".join(names[v] for v in spec.vars)
        return [f"count({value},[{cells}],#>=,1)" for value in spec.values]
    if isinstance(spec, Implication):
        lhs = _render_linear(spec.lhs, names)
        rhs = _render_linear(spec.rhs, names)
        return [f"({lhs}) #=> ({rhs})"]
    if isinstance(spec, TableIn):
        vars_ = ",".join(names[v] for v in spec.vars)
        rows = ",".join("[%s]" % ",".join(str(x) for x in row) for row in spec.rows)
        return [f"table([[{vars_}]],[{rows}])"]
    if isinstance(spec, FloorDivMod):
        return [f"{names[spec.y]} #= {spec.k}*{names[spec.q]}+{names[spec.r]}"]
    raise TypeError(spec)


def emit_clpfd(wb: Workbook) -> str:
    """Program text for the workbook; raises LoweringError if it cannot
    be lowered."""
    instance, vm = lower(wb)
    names = [vm.var_name(v) for v in range(instance.var_count)]
    lines = [
        f"% gridsolve export, workbook revision {wb.revision}",
        ":- use_module(library(clpfd)).",
        "",
    ]
    if not names:
        lines.append("solve([]) :-")
        lines.append("    labeling([ff], []).")
        return "\n".join(lines) + "\n"

    var_list = ",".join(names)
    body: list[str] = []
    for var, name in enumerate(names):
        body.append(f"{name} in {_render_domain(instance.initial_domains[var])}")
    for spec in instance.propagators:
        body.extend(_render_spec(spec, names))
    body.append(f"labeling([ff],[{var_list}])")

    lines.append(f"solve([{var_list}]) :-")
    for item in body[:-1]:
        lines.append(f"    {item},")
    lines.append(f"    {body[-1]}.")
    return "\n".join(lines) + "\n"
