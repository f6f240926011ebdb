"""Cell-constraint language: parser, formatter, copy transform."""

from .ast import (
    MAX_COL,
    MAX_ROW,
    Add,
    AllDifferent,
    CellRef,
    CellSet,
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
    ValueLit,
    ValueRange,
    col_to_letters,
    letters_to_col,
    number_lit,
)
from .formatter import format_ast, format_expr, format_formula, format_value
from .parser import ParseError, parse_cell_formula, parse_cell_ref
from .transform import OutOfGridError, collect_refs, transform_for_copy

__all__ = [
    "MAX_COL",
    "MAX_ROW",
    "Add",
    "AllDifferent",
    "CellRef",
    "CellSet",
    "ConstraintAst",
    "Count",
    "DecLit",
    "DomainLit",
    "Expr",
    "FloorDiv",
    "IfThen",
    "InTable",
    "IntLit",
    "Member",
    "Mod",
    "Mul",
    "OutOfGridError",
    "ParseError",
    "Relation",
    "Sub",
    "Sublist",
    "SumRel",
    "SymbolLit",
    "ValueLit",
    "ValueRange",
    "col_to_letters",
    "collect_refs",
    "format_ast",
    "format_expr",
    "format_formula",
    "format_value",
    "letters_to_col",
    "number_lit",
    "parse_cell_formula",
    "parse_cell_ref",
    "transform_for_copy",
]
