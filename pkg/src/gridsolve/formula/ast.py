"""AST types for the cell-constraint language."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..fd.model import Relop

MAX_COL = 16384
MAX_ROW = 1048576

# Largest denominator a decimal literal may have (six decimal places).
MAX_DENOMINATOR = 10**6


def col_to_letters(col: int) -> str:
    if col < 1:
        raise ValueError(f"column index {col} out of range")
    out = ""
    while col > 0:
        col, rem = divmod(col - 1, 26)
        out = chr(ord("A") + rem) + out
    return out


def letters_to_col(letters: str) -> int:
    col = 0
    for ch in letters.upper():
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return col


@dataclass(frozen=True)
class CellRef:
    col: int
    row: int
    col_abs: bool = False
    row_abs: bool = False

    def __post_init__(self):
        if not 1 <= self.col <= MAX_COL:
            raise ValueError(f"column {self.col} out of range")
        if not 1 <= self.row <= MAX_ROW:
            raise ValueError(f"row {self.row} out of range")

    def text(self) -> str:
        return "%s%s%s%d" % (
            "$" if self.col_abs else "",
            col_to_letters(self.col),
            "$" if self.row_abs else "",
            self.row,
        )

    @classmethod
    def parse(cls, text: str) -> "CellRef":
        from .parser import parse_cell_ref

        return parse_cell_ref(text)

    def __str__(self) -> str:
        return self.text()


CellSet = tuple[CellRef, ...]


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class DecLit:
    """Exact decimal as a fraction in lowest terms, denominator > 1."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 1 or self.den > MAX_DENOMINATOR:
            raise ValueError(f"bad decimal denominator {self.den}")
        if Fraction(self.num, self.den).denominator != self.den:
            raise ValueError("decimal literal not in lowest terms")

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)


@dataclass(frozen=True)
class SymbolLit:
    name: str


ValueLit = Union[IntLit, DecLit, SymbolLit]


def number_lit(value: Union[int, Fraction]) -> ValueLit:
    """IntLit for whole numbers, DecLit otherwise."""
    f = Fraction(value)
    if f.denominator == 1:
        return IntLit(int(f))
    return DecLit(f.numerator, f.denominator)


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class FloorDiv:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mod:
    left: "Expr"
    right: "Expr"


# Parenthesized groups are represented by tree shape alone; the parser
# folds "(...)" into its child so structural equality survives reformatting.
Expr = Union[IntLit, DecLit, SymbolLit, CellRef, Add, Sub, Mul, FloorDiv, Mod]


@dataclass(frozen=True)
class ValueRange:
    lo: ValueLit
    hi: ValueLit


DomainItem = Union[IntLit, DecLit, SymbolLit, ValueRange]


@dataclass(frozen=True)
class DomainLit:
    items: tuple[DomainItem, ...]


@dataclass(frozen=True)
class Relation:
    lhs: Expr
    relop: Relop
    rhs: Expr


@dataclass(frozen=True)
class AllDifferent:
    cells: CellSet


@dataclass(frozen=True)
class Member:
    value: ValueLit
    cells: CellSet


@dataclass(frozen=True)
class Count:
    value: ValueLit
    cells: CellSet
    relop: Relop
    bound: int


@dataclass(frozen=True)
class Sublist:
    values: tuple[ValueLit, ...]
    cells: CellSet


@dataclass(frozen=True)
class IfThen:
    cond: Relation
    then: Relation


@dataclass(frozen=True)
class SumRel:
    cells: CellSet
    relop: Relop  # EQ or NE only
    value: ValueLit


@dataclass(frozen=True)
class InTable:
    table: str
    cells: CellSet


ConstraintAst = Union[
    DomainLit, Relation, AllDifferent, Member, Count, Sublist, IfThen, SumRel, InTable
]
