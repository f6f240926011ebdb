"""Canonical text rendering of constraint ASTs.

format_ast is the inverse of the parser up to structural equality:
parse_cell_formula(format_ast(a)) yields [a] for every well-formed AST.
"""

from __future__ import annotations

from fractions import Fraction

from .ast import (
    Add,
    AllDifferent,
    CellRef,
    ConstraintAst,
    Count,
    DecLit,
    DomainLit,
    Expr,
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


def decimal_text(num: int, den: int) -> str:
    scaled = Fraction(num, den)
    places = 0
    while scaled.denominator != 1:
        scaled *= 10
        places += 1
    sign = "-" if num < 0 else ""
    whole, frac = divmod(abs(int(scaled)), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def format_value(value) -> str:
    if isinstance(value, IntLit):
        return str(value.value)
    if isinstance(value, DecLit):
        return decimal_text(value.num, value.den)
    if isinstance(value, SymbolLit):
        return value.name
    raise TypeError(f"not a value literal: {value!r}")


_ADDITIVE = (Add, Sub)
_MULTIPLICATIVE = (Mul, FloorDiv, Mod)


def _prec(node: Expr) -> int:
    if isinstance(node, _ADDITIVE):
        return 1
    if isinstance(node, _MULTIPLICATIVE):
        return 2
    return 3


def format_expr(node: Expr) -> str:
    return _expr(node, 0, False)


def _expr(node: Expr, parent_prec: int, right_side: bool) -> str:
    if isinstance(node, CellRef):
        return node.text()
    if isinstance(node, (IntLit, DecLit, SymbolLit)):
        return format_value(node)
    if isinstance(node, Add):
        op, prec = "+", 1
    elif isinstance(node, Sub):
        op, prec = "-", 1
    elif isinstance(node, Mul):
        op, prec = "*", 2
    elif isinstance(node, FloorDiv):
        op, prec = "/", 2
    elif isinstance(node, Mod):
        # Spaces keep the operator from fusing with neighbouring tokens.
        op, prec = " MOD ", 2
    else:
        raise TypeError(f"not an expression: {node!r}")
    text = _expr(node.left, prec, False) + op + _expr(node.right, prec, True)
    # Right operands of equal precedence need parentheses to keep the
    # left-associative parse from reshaping the tree.
    if prec < parent_prec or (prec == parent_prec and right_side):
        return f"({text})"
    return text


def format_cells(cells) -> str:
    return "[%s]" % ",".join(ref.text() for ref in cells)


def format_relation(rel: Relation) -> str:
    return format_expr(rel.lhs) + rel.relop.value + format_expr(rel.rhs)


def format_ast(ast: ConstraintAst) -> str:
    if isinstance(ast, DomainLit):
        parts = []
        for item in ast.items:
            if isinstance(item, ValueRange):
                parts.append(f"{format_value(item.lo)}..{format_value(item.hi)}")
            else:
                parts.append(format_value(item))
        return "[%s]" % ",".join(parts)
    if isinstance(ast, Relation):
        return format_relation(ast)
    if isinstance(ast, AllDifferent):
        return f"ALLDIFFERENT({format_cells(ast.cells)})"
    if isinstance(ast, Member):
        return f"MEMBER({format_value(ast.value)},{format_cells(ast.cells)})"
    if isinstance(ast, Count):
        return "COUNT(%s,%s,%s,%d)" % (
            format_value(ast.value),
            format_cells(ast.cells),
            ast.relop.value,
            ast.bound,
        )
    if isinstance(ast, Sublist):
        values = ",".join(format_value(v) for v in ast.values)
        return f"SUBLIST([{values}],{format_cells(ast.cells)})"
    if isinstance(ast, IfThen):
        return f"IF({format_relation(ast.cond)})THEN({format_relation(ast.then)})"
    if isinstance(ast, SumRel):
        return f"SUM({format_cells(ast.cells)}){ast.relop.value}{format_value(ast.value)}"
    if isinstance(ast, InTable):
        return f"INTABLE({ast.table},{format_cells(ast.cells)})"
    raise TypeError(f"not a constraint AST: {ast!r}")


def format_formula(asts) -> str:
    """Join several constraints back into one cell's text."""
    return ";".join(format_ast(a) for a in asts)
