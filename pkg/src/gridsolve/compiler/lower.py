"""Lower a workbook to a CspInstance.

Value model: a cell's displayed value is an exact rational. One global
scale factor (the lcm of every decimal literal's denominator in the
workbook) turns all cell values into solver integers: solver = scale *
display. Map-table symbols resolve to their integer codes before scaling.
Auxiliary variables introduced for MOD and / live in unscaled (display)
units; mixed-unit relations are cleared of denominators before they
become integer linear propagators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from ..fd import (
    CountRel,
    CspInstance,
    Domain,
    FloorDivMod,
    Implication,
    LinearRel,
    LinExpr,
    OccursAtLeastOnce,
    PropagatorSpec,
    Relop,
    TableIn,
)
from ..formula import (
    Add,
    CellRef,
    ConstraintAst,
    Count,
    DecLit,
    DomainLit,
    FloorDiv,
    IfThen,
    InTable,
    IntLit,
    Member,
    Mod,
    Mul,
    Relation,
    Sub,
    Sublist,
    SumRel,
    SymbolLit,
    ValueRange,
    col_to_letters,
    format_ast,
)
from ..formula import AllDifferent as AstAllDifferent
from ..fd import AllDifferent as FdAllDifferent
from ..sheet import Addr, Workbook

# codes carried by diagnostics (machine readable)
UNRESOLVED_SYMBOL = "unresolved_symbol"
UNDOMAINED_CELL = "undomained_cell"
NONLINEAR = "nonlinear"
FRACTIONAL_IN_INTEGER_CONTEXT = "fractional_in_integer_context"
BAD_DIVISOR = "bad_divisor"
UNKNOWN_TABLE = "unknown_table"
ARITY_MISMATCH = "arity_mismatch"
INVALID_RANGE = "invalid_range"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    cell: str
    code: str
    message: str


class LoweringError(Exception):
    """Raised when any diagnostic has severity error."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(f"{d.cell}: {d.message}" for d in diagnostics))


# Auxiliary variable definitions, in allocation order, for reconstructing
# aux values from cell values when checking external solutions.
#   ("lin", terms, const): var = sum of coeff*value(v) + const (display units)
#   ("quot", s, k) / ("rem", s, k): var = value(s) // k  or  % k
AuxDef = tuple


@dataclass
class VarMap:
    """Cell-to-variable mapping plus everything needed to lift solutions."""

    cell_to_var: dict[Addr, int] = field(default_factory=dict)
    var_to_cell: list[Optional[Addr]] = field(default_factory=list)
    scale: int = 1
    # per-cell map table used for symbolic display, by table name
    display_table: dict[Addr, str] = field(default_factory=dict)
    symbol_tables_used: list[str] = field(default_factory=list)
    aux_defs: list[tuple[int, AuxDef]] = field(default_factory=list)
    aux_names: dict[int, str] = field(default_factory=dict)
    # one (cell address, constraint text) per propagator
    provenance: list[tuple[str, str]] = field(default_factory=list)

    def var_name(self, var: int) -> str:
        cell = self.var_to_cell[var]
        if cell is not None:
            return f"{col_to_letters(cell[0])}{cell[1]}"
        return self.aux_names[var]


def addr_text(addr: Addr) -> str:
    return f"{col_to_letters(addr[0])}{addr[1]}"


# linear form in display units: coefficients per variable plus a constant
_LinForm = tuple[dict[int, Fraction], Fraction]


class _Lowerer:
    def __init__(self, wb: Workbook):
        self.wb = wb
        self.diags: list[Diagnostic] = []
        self.vm = VarMap()
        self.domains: list[Domain] = []
        self.props: list[PropagatorSpec] = []
        self.here = ""  # cell hosting the constraint being lowered
        # memoized channels: linear-form key -> sum var; (key, k) -> (q, r)
        self._sum_channel: dict = {}
        self._divmod_channel: dict = {}

    # -- diagnostics ---------------------------------------------------------

    def error(self, code: str, message: str, cell: str = "") -> None:
        self.diags.append(Diagnostic("error", cell or self.here, code, message))

    def fail_if_errors(self) -> None:
        if self.diags:
            raise LoweringError(self.diags)

    # -- symbols and values --------------------------------------------------

    def resolve_value(self, lit) -> Optional[Fraction]:
        if isinstance(lit, IntLit):
            return Fraction(lit.value)
        if isinstance(lit, DecLit):
            return lit.as_fraction()
        if isinstance(lit, SymbolLit):
            for table in self.wb.map_tables:
                value = table.value_of(lit.name)
                if value is not None:
                    if table.name not in self.vm.symbol_tables_used:
                        self.vm.symbol_tables_used.append(table.name)
                    return Fraction(value)
            self.error(
                UNRESOLVED_SYMBOL, f"symbol {lit.name!r} is in no map table"
            )
            return None
        raise TypeError(lit)

    def symbol_table_of(self, lit) -> Optional[str]:
        if isinstance(lit, SymbolLit):
            for table in self.wb.map_tables:
                if table.value_of(lit.name) is not None:
                    return table.name
        return None

    def to_solver_int(self, value: Fraction) -> int:
        scaled = value * self.vm.scale
        # scale is the lcm of every decimal denominator, so this is exact
        assert scaled.denominator == 1, (value, self.vm.scale)
        return int(scaled)

    # -- variable allocation ---------------------------------------------------

    def new_aux(self, dom: Domain, definition: AuxDef) -> int:
        var = len(self.domains)
        self.domains.append(dom)
        self.vm.var_to_cell.append(None)
        name = f"_aux{len(self.vm.aux_names) + 1}"
        self.vm.aux_names[var] = name
        self.vm.aux_defs.append((var, definition))
        return var

    def cell_var(self, ref: CellRef) -> Optional[int]:
        addr = (ref.col, ref.row)
        var = self.vm.cell_to_var.get(addr)
        if var is None:
            self.error(
                UNDOMAINED_CELL,
                f"cell {ref.text()} is referenced but has no domain or pin",
            )
        return var

    def add_prop(self, spec: PropagatorSpec, text: str) -> None:
        self.props.append(spec)
        self.vm.provenance.append((self.here, text))

    # -- scale ----------------------------------------------------------------

    def compute_scale(self) -> None:
        denominators = [1]

        def walk_expr(node):
            if isinstance(node, DecLit):
                denominators.append(node.den)
            elif isinstance(node, (Add, Sub, Mul, FloorDiv, Mod)):
                walk_expr(node.left)
                walk_expr(node.right)

        def walk_value(lit):
            if isinstance(lit, DecLit):
                denominators.append(lit.den)

        for _, cell in self.wb.constrained_cells():
            if cell.pinned is not None:
                walk_value(cell.pinned)
            for ast in cell.asts:
                if isinstance(ast, DomainLit):
                    for item in ast.items:
                        if isinstance(item, ValueRange):
                            walk_value(item.lo)
                            walk_value(item.hi)
                        else:
                            walk_value(item)
                elif isinstance(ast, Relation):
                    walk_expr(ast.lhs)
                    walk_expr(ast.rhs)
                elif isinstance(ast, IfThen):
                    walk_expr(ast.cond.lhs)
                    walk_expr(ast.cond.rhs)
                    walk_expr(ast.then.lhs)
                    walk_expr(ast.then.rhs)
                elif isinstance(ast, (Member, Count)):
                    walk_value(ast.value)
                elif isinstance(ast, Sublist):
                    for v in ast.values:
                        walk_value(v)
                elif isinstance(ast, SumRel):
                    walk_value(ast.value)
        self.vm.scale = math.lcm(*denominators)

    # -- initial domains --------------------------------------------------------

    def domain_values(self, lit: DomainLit) -> Optional[set[Fraction]]:
        out: set[Fraction] = set()
        for item in lit.items:
            if isinstance(item, ValueRange):
                lo = self.resolve_value(item.lo)
                hi = self.resolve_value(item.hi)
                if lo is None or hi is None:
                    return None
                if lo.denominator != 1 or hi.denominator != 1:
                    self.error(
                        INVALID_RANGE, "range endpoints must be whole numbers"
                    )
                    return None
                if lo > hi:
                    self.error(INVALID_RANGE, f"empty range {lo}..{hi}")
                    return None
                out.update(Fraction(v) for v in range(int(lo), int(hi) + 1))
            else:
                value = self.resolve_value(item)
                if value is None:
                    return None
                out.add(value)
        return out

    def build_cell_domains(self) -> None:
        for addr, cell in self.wb.constrained_cells():
            domain_lits = [a for a in cell.asts if isinstance(a, DomainLit)]
            if not domain_lits and cell.pinned is None:
                continue
            self.here = addr_text(addr)
            # An empty intersection (for example a pin outside the declared
            # domain) is not a lowering error: it lowers to an empty domain
            # and the solver reports UNSAT, keeping the relax-and-retry loop.
            values: Optional[set[Fraction]] = None
            for lit in domain_lits:
                got = self.domain_values(lit)
                if got is None:
                    values = set()
                    break
                values = got if values is None else values & got
                for item in lit.items:
                    table = self.symbol_table_of(item)
                    if table is not None:
                        self.vm.display_table.setdefault(addr, table)
                        break
            if cell.pinned is not None:
                pin = self.resolve_value(cell.pinned)
                if pin is None:
                    pin_set: set[Fraction] = set()
                else:
                    pin_set = {pin}
                    table = self.symbol_table_of(cell.pinned)
                    if table is not None:
                        self.vm.display_table.setdefault(addr, table)
                values = pin_set if values is None else values & pin_set
            if values is None:
                values = set()
            var = len(self.domains)
            self.vm.cell_to_var[addr] = var
            self.vm.var_to_cell.append(addr)
            self.domains.append(
                Domain.from_values(sorted(self.to_solver_int(v) for v in values))
            )

    # -- expressions -------------------------------------------------------------

    def _has_decimal(self, node) -> bool:
        if isinstance(node, DecLit):
            return True
        if isinstance(node, (Add, Sub, Mul, FloorDiv, Mod)):
            return self._has_decimal(node.left) or self._has_decimal(node.right)
        return False

    def linearize(self, node) -> Optional[_LinForm]:
        """Linear form of an expression in display units; cell variables
        carry an implicit 1/scale since their solver values are scaled."""
        if isinstance(node, (IntLit, DecLit, SymbolLit)):
            value = self.resolve_value(node)
            if value is None:
                return None
            return {}, value
        if isinstance(node, CellRef):
            var = self.cell_var(node)
            if var is None:
                return None
            return {var: Fraction(1, self.vm.scale)}, Fraction(0)
        if isinstance(node, (Add, Sub)):
            left = self.linearize(node.left)
            right = self.linearize(node.right)
            if left is None or right is None:
                return None
            sign = 1 if isinstance(node, Add) else -1
            coeffs = dict(left[0])
            for var, c in right[0].items():
                coeffs[var] = coeffs.get(var, Fraction(0)) + sign * c
            return coeffs, left[1] + sign * right[1]
        if isinstance(node, Mul):
            left = self.linearize(node.left)
            right = self.linearize(node.right)
            if left is None or right is None:
                return None
            if left[0] and right[0]:
                self.error(NONLINEAR, "product of two non-constant expressions")
                return None
            if right[0]:
                left, right = right, left
            factor = right[1]
            return {v: c * factor for v, c in left[0].items()}, left[1] * factor
        if isinstance(node, (FloorDiv, Mod)):
            return self.lower_divmod(node)
        raise TypeError(node)

    def lower_divmod(self, node: Union[FloorDiv, Mod]) -> Optional[_LinForm]:
        if self._has_decimal(node.left) or self._has_decimal(node.right):
            self.error(
                FRACTIONAL_IN_INTEGER_CONTEXT,
                "decimal literals cannot appear under MOD or /",
            )
            return None
        divisor_form = self.linearize(node.right)
        if divisor_form is None:
            return None
        if divisor_form[0]:
            self.error(NONLINEAR, "divisor must be a constant")
            return None
        k_frac = divisor_form[1]
        if k_frac.denominator != 1 or k_frac < 1:
            self.error(BAD_DIVISOR, f"divisor must be a positive integer, got {k_frac}")
            return None
        k = int(k_frac)
        operand = self.linearize(node.left)
        if operand is None:
            return None
        s = self.sum_channel(operand)
        q, r = self.divmod_channel(operand, s, k)
        out = q if isinstance(node, FloorDiv) else r
        return {out: Fraction(1)}, Fraction(0)

    def _form_key(self, form: _LinForm):
        coeffs, const = form
        return tuple(sorted(coeffs.items())), const

    def _form_bounds(self, form: _LinForm) -> tuple[Fraction, Fraction]:
        coeffs, const = form
        lo = hi = const
        for var, c in coeffs.items():
            dom = self.domains[var]
            if dom.is_empty():
                return const, const
            a, b = Fraction(dom.min_value()), Fraction(dom.max_value())
            if c >= 0:
                lo, hi = lo + c * a, hi + c * b
            else:
                lo, hi = lo + c * b, hi + c * a
        return lo, hi

    def sum_channel(self, form: _LinForm) -> int:
        """Integer variable equal to the (display-unit) value of the form."""
        key = self._form_key(form)
        if key in self._sum_channel:
            return self._sum_channel[key]
        coeffs, const = form
        # A bare 1*var form with an integer-unit variable needs no channel.
        if (
            const == 0
            and len(coeffs) == 1
            and next(iter(coeffs.items()))[1] == 1
        ):
            var = next(iter(coeffs))
            self._sum_channel[key] = var
            return var
        lo, hi = self._form_bounds(form)
        dom = Domain.interval(math.ceil(lo), math.floor(hi))
        var = self.new_aux(dom, ("lin", tuple(sorted(coeffs.items())), const))
        self._sum_channel[key] = var
        # channel equation: var - form = 0
        eq_coeffs = {v: -c for v, c in coeffs.items()}
        eq_coeffs[var] = eq_coeffs.get(var, Fraction(0)) + 1
        self.add_prop(
            self.to_linear_rel((eq_coeffs, -const), Relop.EQ),
            f"{self.vm.aux_names[var]} bridges a MOD// operand",
        )
        return var

    def divmod_channel(self, form: _LinForm, s: int, k: int) -> tuple[int, int]:
        key = (self._form_key(form), k)
        if key in self._divmod_channel:
            return self._divmod_channel[key]
        s_dom = self.domains[s]
        if s_dom.is_empty():
            q_dom = Domain.empty()
        else:
            q_dom = Domain.interval(
                s_dom.min_value() // k, s_dom.max_value() // k
            )
        q = self.new_aux(q_dom, ("quot", s, k))
        r = self.new_aux(Domain.interval(0, k - 1), ("rem", s, k))
        self._divmod_channel[key] = (q, r)
        self.add_prop(
            FloorDivMod(s, k, q, r),
            f"{self.vm.var_name(s)} = {k}*{self.vm.aux_names[q]}+{self.vm.aux_names[r]}",
        )
        return q, r

    def to_linear_rel(self, form: _LinForm, relop: Relop) -> LinearRel:
        """Clear denominators: the form (display units, cells at 1/scale)
        becomes an integer LinExpr over solver values."""
        coeffs, const = form
        multiplier = math.lcm(
            const.denominator, *(c.denominator for c in coeffs.values())
        )
        terms = [(int(c * multiplier), v) for v, c in sorted(coeffs.items())]
        return LinearRel(
            LinExpr.build(terms, int(const * multiplier)), relop
        )

    def lower_relation(self, rel: Relation) -> Optional[LinearRel]:
        lhs = self.linearize(rel.lhs)
        rhs = self.linearize(rel.rhs)
        if lhs is None or rhs is None:
            return None
        coeffs = dict(lhs[0])
        for var, c in rhs[0].items():
            coeffs[var] = coeffs.get(var, Fraction(0)) - c
        return self.to_linear_rel((coeffs, lhs[1] - rhs[1]), rel.relop)

    # -- constraints ---------------------------------------------------------------

    def cells_to_vars(self, cells, dedup: bool) -> Optional[tuple[int, ...]]:
        out: list[int] = []
        seen: set[int] = set()
        for ref in cells:
            var = self.cell_var(ref)
            if var is None:
                return None
            if dedup:
                if var in seen:
                    continue
                seen.add(var)
            out.append(var)
        return tuple(out)

    def lower_constraint(self, ast: ConstraintAst) -> None:
        text = format_ast(ast)
        if isinstance(ast, DomainLit):
            return  # consumed when the cell domains were built
        if isinstance(ast, Relation):
            rel = self.lower_relation(ast)
            if rel is not None:
                self.add_prop(rel, text)
            return
        if isinstance(ast, IfThen):
            cond = self.lower_relation(ast.cond)
            then = self.lower_relation(ast.then)
            if cond is not None and then is not None:
                self.add_prop(Implication(cond, then), text)
            return
        if isinstance(ast, AstAllDifferent):
            vars_ = self.cells_to_vars(ast.cells, dedup=True)
            if vars_ is not None:
                self.add_prop(FdAllDifferent(vars_), text)
            return
        if isinstance(ast, Member):
            value = self.resolve_value(ast.value)
            vars_ = self.cells_to_vars(ast.cells, dedup=True)
            if value is not None and vars_ is not None:
                self.add_prop(
                    OccursAtLeastOnce((self.to_solver_int(value),), vars_), text
                )
            return
        if isinstance(ast, Sublist):
            values = [self.resolve_value(v) for v in ast.values]
            vars_ = self.cells_to_vars(ast.cells, dedup=True)
            if vars_ is not None and all(v is not None for v in values):
                solver_values = tuple(
                    dict.fromkeys(self.to_solver_int(v) for v in values)
                )
                self.add_prop(OccursAtLeastOnce(solver_values, vars_), text)
            return
        if isinstance(ast, Count):
            value = self.resolve_value(ast.value)
            vars_ = self.cells_to_vars(ast.cells, dedup=True)
            if value is not None and vars_ is not None:
                self.add_prop(
                    CountRel(self.to_solver_int(value), vars_, ast.relop, ast.bound),
                    text,
                )
            return
        if isinstance(ast, SumRel):
            value = self.resolve_value(ast.value)
            vars_ = self.cells_to_vars(ast.cells, dedup=False)
            if value is None or vars_ is None:
                return
            coeffs: dict[int, Fraction] = {}
            for var in vars_:
                coeffs[var] = coeffs.get(var, Fraction(0)) + Fraction(1, self.vm.scale)
            self.add_prop(self.to_linear_rel((coeffs, -value), ast.relop), text)
            return
        if isinstance(ast, InTable):
            self.lower_intable(ast, text)
            return
        raise TypeError(ast)

    def lower_intable(self, ast: InTable, text: str) -> None:
        table = self.wb.find_fact_table(ast.table)
        if table is None:
            self.error(UNKNOWN_TABLE, f"no fact table named {ast.table!r}")
            return
        vars_ = self.cells_to_vars(ast.cells, dedup=False)
        if vars_ is None:
            return
        if len(vars_) != table.arity:
            self.error(
                ARITY_MISMATCH,
                f"{ast.table!r} has arity {table.arity}, got {len(vars_)} cells",
            )
            return
        rows = []
        for row in table.rows:
            solver_row = []
            for item in row:
                if isinstance(item, str):
                    value = self.resolve_value(SymbolLit(item))
                    if value is None:
                        return
                else:
                    value = Fraction(item)
                solver_row.append(self.to_solver_int(value))
            rows.append(tuple(solver_row))
        self.add_prop(TableIn(vars_, tuple(rows)), text)

    # -- driver -------------------------------------------------------------------

    def run(self) -> tuple[CspInstance, VarMap]:
        self.compute_scale()
        self.build_cell_domains()
        self.fail_if_errors()
        for addr, cell in self.wb.constrained_cells():
            self.here = addr_text(addr)
            for ast in cell.asts:
                self.lower_constraint(ast)
        self.fail_if_errors()
        instance = CspInstance(
            len(self.domains), tuple(self.domains), tuple(self.props)
        )
        return instance, self.vm


def lower(wb: Workbook) -> tuple[CspInstance, VarMap]:
    """Compile the workbook; raises LoweringError carrying Diagnostics."""
    return _Lowerer(wb).run()
