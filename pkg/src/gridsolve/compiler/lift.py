"""Turn solver assignments back into display values, and verify external
display-level solutions against the lowered model."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..fd import Assignment, spec_holds
from ..formula import CellRef, DecLit, IntLit, SymbolLit, ValueLit, number_lit
from ..sheet import Workbook
from .lower import VarMap, addr_text, lower


class InversionGapError(Exception):
    """A solver integer has no symbol in the cell's map table. Lowering
    guarantees this cannot happen for its own solutions."""


class SolutionShapeError(Exception):
    """The external solution is malformed (missing cells, unknown keys)."""


def lift_solution(
    assignment: Sequence[int], vm: VarMap, wb: Workbook
) -> dict[CellRef, ValueLit]:
    """Descale each cell's solver value, inverting symbols through the
    cell's map table. Auxiliary variables are omitted."""
    out: dict[CellRef, ValueLit] = {}
    for addr, var in vm.cell_to_var.items():
        value = Fraction(assignment[var], vm.scale)
        table_name = vm.display_table.get(addr)
        ref = CellRef(addr[0], addr[1])
        if table_name is not None:
            table = wb.find_map_table(table_name)
            symbol = (
                table.symbol_of(int(value))
                if table is not None and value.denominator == 1
                else None
            )
            if symbol is None:
                raise InversionGapError(
                    f"{addr_text(addr)}: solver value {assignment[var]} has no "
                    f"symbol in map table {table_name!r}"
                )
            out[ref] = SymbolLit(symbol)
        else:
            out[ref] = number_lit(value)
    return out


def display_value_text(value: ValueLit) -> str:
    from ..formula import format_value

    return format_value(value)


def _to_solver_int(wb: Workbook, scale: int, lit: ValueLit) -> "int | None":
    if isinstance(lit, SymbolLit):
        resolved = wb.resolve_symbol(lit.name)
        if resolved is None:
            return None
        frac = Fraction(resolved)
    elif isinstance(lit, IntLit):
        frac = Fraction(lit.value)
    elif isinstance(lit, DecLit):
        frac = lit.as_fraction()
    else:
        raise TypeError(lit)
    scaled = frac * scale
    return int(scaled) if scaled.denominator == 1 else None


def verify_display_solution(
    wb: Workbook, values: dict[str, ValueLit]
) -> tuple[bool, str]:
    """Scale/map a display-level solution and run the direct constraint
    check. Returns (ok, message); the message names the first violated
    constraint and its cell."""
    instance, vm = lower(wb)
    assignment: list = [None] * instance.var_count

    known = {addr_text(addr) for addr in vm.cell_to_var}
    for key in values:
        if key not in known:
            raise SolutionShapeError(f"{key} is not a constrained cell")

    for addr, var in vm.cell_to_var.items():
        key = addr_text(addr)
        if key not in values:
            raise SolutionShapeError(f"missing value for cell {key}")
        solver = _to_solver_int(wb, vm.scale, values[key])
        if solver is None or not instance.initial_domains[var].contains(solver):
            return False, f"{key}: value {display_value_text(values[key])} is outside the cell's domain"
        assignment[var] = solver

    for var, definition in vm.aux_defs:
        kind = definition[0]
        if kind == "lin":
            _, terms, const = definition
            total = const + sum(c * assignment[v] for v, c in terms)
            if total.denominator != 1:
                return False, (
                    f"{vm.aux_names[var]}: MOD// operand value {total} is not a whole number"
                )
            assignment[var] = int(total)
        elif kind == "quot":
            _, s, k = definition
            assignment[var] = assignment[s] // k
        else:  # rem
            _, s, k = definition
            assignment[var] = assignment[s] % k

    for idx, spec in enumerate(instance.propagators):
        if not spec_holds(spec, assignment):
            cell, text = vm.provenance[idx]
            return False, f"{cell}: violates {text}"
    return True, ""


def assignment_for_display(wb: Workbook, values: dict[str, ValueLit]) -> Assignment:
    """The full solver assignment implied by a display solution (test hook)."""
    instance, vm = lower(wb)
    ok, message = verify_display_solution(wb, values)
    if not ok:
        raise ValueError(message)
    out: list = [None] * instance.var_count
    for addr, var in vm.cell_to_var.items():
        out[var] = _to_solver_int(wb, vm.scale, values[addr_text(addr)])
    for var, definition in vm.aux_defs:
        if definition[0] == "lin":
            _, terms, const = definition
            out[var] = int(const + sum(c * out[v] for v, c in terms))
        elif definition[0] == "quot":
            out[var] = out[definition[1]] // definition[2]
        else:
            out[var] = out[definition[1]] % definition[2]
    return tuple(out)
