"""Reference shifting for copied constraints, and reference extraction."""

from __future__ import annotations

from .ast import (
    MAX_COL,
    MAX_ROW,
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
)


class OutOfGridError(ValueError):
    """A shifted reference left the grid."""

    def __init__(self, ref: CellRef, dcol: int, drow: int):
        super().__init__(
            f"copying moves {ref.text()} by ({dcol},{drow}), outside the grid"
        )
        self.ref = ref


def _shift_ref(ref: CellRef, dcol: int, drow: int) -> CellRef:
    col = ref.col if ref.col_abs else ref.col + dcol
    row = ref.row if ref.row_abs else ref.row + drow
    if not (1 <= col <= MAX_COL and 1 <= row <= MAX_ROW):
        raise OutOfGridError(ref, dcol, drow)
    return CellRef(col, row, ref.col_abs, ref.row_abs)


def _shift_expr(node: Expr, dcol: int, drow: int) -> Expr:
    if isinstance(node, CellRef):
        return _shift_ref(node, dcol, drow)
    if isinstance(node, (IntLit, DecLit, SymbolLit)):
        return node
    if isinstance(node, (Add, Sub, Mul, FloorDiv, Mod)):
        return type(node)(
            _shift_expr(node.left, dcol, drow), _shift_expr(node.right, dcol, drow)
        )
    raise TypeError(f"not an expression: {node!r}")


def _shift_cells(cells, dcol: int, drow: int):
    return tuple(_shift_ref(ref, dcol, drow) for ref in cells)


def _shift_relation(rel: Relation, dcol: int, drow: int) -> Relation:
    return Relation(
        _shift_expr(rel.lhs, dcol, drow), rel.relop, _shift_expr(rel.rhs, dcol, drow)
    )


def transform_for_copy(ast: ConstraintAst, src: CellRef, dst: CellRef) -> ConstraintAst:
    """Shift every relative reference by the src->dst offset."""
    dcol = dst.col - src.col
    drow = dst.row - src.row
    if dcol == 0 and drow == 0:
        return ast
    if isinstance(ast, DomainLit):
        return ast
    if isinstance(ast, Relation):
        return _shift_relation(ast, dcol, drow)
    if isinstance(ast, AllDifferent):
        return AllDifferent(_shift_cells(ast.cells, dcol, drow))
    if isinstance(ast, Member):
        return Member(ast.value, _shift_cells(ast.cells, dcol, drow))
    if isinstance(ast, Count):
        return Count(ast.value, _shift_cells(ast.cells, dcol, drow), ast.relop, ast.bound)
    if isinstance(ast, Sublist):
        return Sublist(ast.values, _shift_cells(ast.cells, dcol, drow))
    if isinstance(ast, IfThen):
        return IfThen(
            _shift_relation(ast.cond, dcol, drow), _shift_relation(ast.then, dcol, drow)
        )
    if isinstance(ast, SumRel):
        return SumRel(_shift_cells(ast.cells, dcol, drow), ast.relop, ast.value)
    if isinstance(ast, InTable):
        return InTable(ast.table, _shift_cells(ast.cells, dcol, drow))
    raise TypeError(f"not a constraint AST: {ast!r}")


def _expr_refs(node: Expr, out: list[CellRef]) -> None:
    if isinstance(node, CellRef):
        out.append(node)
    elif isinstance(node, (Add, Sub, Mul, FloorDiv, Mod)):
        _expr_refs(node.left, out)
        _expr_refs(node.right, out)


def collect_refs(ast: ConstraintAst) -> tuple[CellRef, ...]:
    """Every cell reference in source order, duplicates included."""
    out: list[CellRef] = []
    if isinstance(ast, DomainLit):
        pass
    elif isinstance(ast, Relation):
        _expr_refs(ast.lhs, out)
        _expr_refs(ast.rhs, out)
    elif isinstance(ast, (AllDifferent, Member, Count, Sublist, InTable, SumRel)):
        out.extend(ast.cells)
    elif isinstance(ast, IfThen):
        _expr_refs(ast.cond.lhs, out)
        _expr_refs(ast.cond.rhs, out)
        _expr_refs(ast.then.lhs, out)
        _expr_refs(ast.then.rhs, out)
    else:
        raise TypeError(f"not a constraint AST: {ast!r}")
    return tuple(out)
