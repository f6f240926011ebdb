"""Display-level constraint evaluation over exact rationals.

An independent oracle: it interprets workbook constraint ASTs directly on
a cell->Fraction environment, with no scaling and no lowering, so tests
can confirm that descaled solver solutions satisfy the original
constraints (and that every exact rational solution is found).
"""

from __future__ import annotations

from fractions import Fraction

from gridsolve.fd import Relop
from gridsolve.formula import (
    Add,
    AllDifferent,
    CellRef,
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
)

_CMP = {
    Relop.EQ: lambda a, b: a == b,
    Relop.NE: lambda a, b: a != b,
    Relop.LT: lambda a, b: a < b,
    Relop.LE: lambda a, b: a <= b,
    Relop.GT: lambda a, b: a > b,
    Relop.GE: lambda a, b: a >= b,
}


def _value(wb, lit) -> Fraction:
    if isinstance(lit, IntLit):
        return Fraction(lit.value)
    if isinstance(lit, DecLit):
        return Fraction(lit.num, lit.den)
    if isinstance(lit, SymbolLit):
        resolved = wb.resolve_symbol(lit.name)
        assert resolved is not None, lit
        return Fraction(resolved)
    raise TypeError(lit)


def _cell(env, ref: CellRef) -> Fraction:
    return env[(ref.col, ref.row)]


def _expr(wb, env, node) -> Fraction:
    if isinstance(node, (IntLit, DecLit, SymbolLit)):
        return _value(wb, node)
    if isinstance(node, CellRef):
        return _cell(env, node)
    if isinstance(node, Add):
        return _expr(wb, env, node.left) + _expr(wb, env, node.right)
    if isinstance(node, Sub):
        return _expr(wb, env, node.left) - _expr(wb, env, node.right)
    if isinstance(node, Mul):
        return _expr(wb, env, node.left) * _expr(wb, env, node.right)
    if isinstance(node, (FloorDiv, Mod)):
        left = _expr(wb, env, node.left)
        right = _expr(wb, env, node.right)
        assert left.denominator == 1 and right.denominator == 1, node
        if isinstance(node, FloorDiv):
            return Fraction(int(left) // int(right))
        return Fraction(int(left) % int(right))
    raise TypeError(node)


def _relation(wb, env, rel: Relation) -> bool:
    return _CMP[rel.relop](_expr(wb, env, rel.lhs), _expr(wb, env, rel.rhs))


def constraint_holds(wb, env, ast) -> bool:
    """env maps (col, row) -> Fraction (symbol cells hold their codes)."""
    if isinstance(ast, DomainLit):
        return True  # domains are handled by the enumeration itself
    if isinstance(ast, Relation):
        return _relation(wb, env, ast)
    if isinstance(ast, IfThen):
        return _relation(wb, env, ast.then) if _relation(wb, env, ast.cond) else True
    if isinstance(ast, AllDifferent):
        got = [_cell(env, r) for r in dict.fromkeys(ast.cells)]
        return len(got) == len(set(got))
    if isinstance(ast, Member):
        want = _value(wb, ast.value)
        return any(_cell(env, r) == want for r in ast.cells)
    if isinstance(ast, Sublist):
        present = {_cell(env, r) for r in ast.cells}
        return all(_value(wb, v) in present for v in ast.values)
    if isinstance(ast, Count):
        want = _value(wb, ast.value)
        n = sum(1 for r in dict.fromkeys(ast.cells) if _cell(env, r) == want)
        return _CMP[ast.relop](n, ast.bound)
    if isinstance(ast, SumRel):
        total = sum(_cell(env, r) for r in ast.cells)
        return _CMP[ast.relop](total, _value(wb, ast.value))
    if isinstance(ast, InTable):
        table = wb.find_fact_table(ast.table)
        assert table is not None
        got = tuple(_cell(env, r) for r in ast.cells)
        for row in table.rows:
            want = tuple(
                Fraction(wb.resolve_symbol(x)) if isinstance(x, str) else Fraction(x)
                for x in row
            )
            if got == want:
                return True
        return False
    raise TypeError(ast)


def domain_of(wb, cell) -> "set[Fraction] | None":
    """The rational value set a cell's domain literals and pin allow."""
    values = None
    for ast in cell.asts:
        if not isinstance(ast, DomainLit):
            continue
        got = set()
        for item in ast.items:
            if isinstance(item, ValueRange):
                lo, hi = _value(wb, item.lo), _value(wb, item.hi)
                got.update(Fraction(v) for v in range(int(lo), int(hi) + 1))
            else:
                got.add(_value(wb, item))
        values = got if values is None else values & got
    if cell.pinned is not None:
        pin = {_value(wb, cell.pinned)}
        values = pin if values is None else values & pin
    return values


def all_rational_solutions(wb) -> list[dict]:
    """Enumerate the Cartesian product of display domains, filtered by
    direct rational evaluation of every constraint."""
    import itertools

    cells = wb.constrained_cells()
    var_addrs = []
    pools = []
    constraints = []
    for addr, cell in cells:
        dom = domain_of(wb, cell)
        if dom is not None:
            var_addrs.append(addr)
            pools.append(sorted(dom))
        constraints.extend(ast for ast in cell.asts if not isinstance(ast, DomainLit))
    out = []
    for combo in itertools.product(*pools):
        env = dict(zip(var_addrs, combo))
        if all(constraint_holds(wb, env, ast) for ast in constraints):
            out.append(env)
    return out
