"""Workbook model: constraint cells, pins, auxiliary tables, view state."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union

from ..formula import (
    CellRef,
    ConstraintAst,
    ValueLit,
    format_ast,
    parse_cell_formula,
    transform_for_copy,
)


class WorkbookError(Exception):
    pass


class DuplicateNameError(WorkbookError):
    pass


class NonBijectiveError(WorkbookError):
    pass


class UnknownSampleError(WorkbookError):
    pass


class BadCopyError(WorkbookError):
    pass


@dataclass(frozen=True)
class Cell:
    """One grid cell. asts always mirrors formula_text."""

    formula_text: str = ""
    asts: tuple[ConstraintAst, ...] = ()
    pinned: Optional[ValueLit] = None
    solution_overlay: Optional[ValueLit] = None

    def is_inert(self) -> bool:
        return not self.asts and self.pinned is None


@dataclass(frozen=True)
class MapTable:
    """Bijection between domain symbols and solver integers."""

    name: str
    entries: tuple[tuple[str, int], ...]

    def __post_init__(self):
        symbols = [s for s, _ in self.entries]
        numbers = [n for _, n in self.entries]
        if len(set(symbols)) != len(symbols) or len(set(numbers)) != len(numbers):
            raise NonBijectiveError(
                f"map table {self.name!r} must map symbols and integers one-to-one"
            )

    def value_of(self, symbol: str) -> Optional[int]:
        for s, n in self.entries:
            if s == symbol:
                return n
        return None

    def symbol_of(self, value: int) -> Optional[str]:
        for s, n in self.entries:
            if n == value:
                return s
        return None


@dataclass(frozen=True)
class FactTable:
    """Named extensional relation; rows mix integers and map-table symbols."""

    name: str
    arity: int
    rows: tuple[tuple[Union[int, str], ...], ...]

    def __post_init__(self):
        if self.arity < 1:
            raise WorkbookError(f"fact table {self.name!r} needs arity >= 1")
        for row in self.rows:
            if len(row) != self.arity:
                raise WorkbookError(
                    f"fact table {self.name!r} row {row!r} has wrong arity"
                )


class ViewMode(enum.Enum):
    CONSTRAINTS = "constraints"
    SOLUTION = "solution"


Addr = tuple[int, int]  # (col, row)


def addr_of(ref: CellRef) -> Addr:
    return (ref.col, ref.row)


@dataclass
class Sheet:
    name: str = "Sheet1"
    cells: dict[Addr, Cell] = field(default_factory=dict)


class CopyMode(enum.Enum):
    ALL_APPEND = "all_append"
    ONE_APPEND = "one_append"


class Workbook:
    """Mutable workbook; every mutation bumps `revision`."""

    def __init__(self):
        self.sheets: list[Sheet] = [Sheet()]
        self.map_tables: list[MapTable] = []
        self.fact_tables: list[FactTable] = []
        self.view_mode = ViewMode.CONSTRAINTS
        self.revision = 0

    # -- plumbing ----------------------------------------------------------

    def sheet(self, name: Optional[str] = None) -> Sheet:
        if name is None:
            return self.sheets[0]
        for s in self.sheets:
            if s.name == name:
                return s
        raise WorkbookError(f"no sheet named {name!r}")

    def cell(self, ref: CellRef, sheet: Optional[str] = None) -> Cell:
        return self.sheet(sheet).cells.get(addr_of(ref), Cell())

    def constrained_cells(self, sheet: Optional[str] = None) -> list[tuple[Addr, Cell]]:
        """Non-inert cells in row-major order."""
        items = [
            (addr, cell)
            for addr, cell in self.sheet(sheet).cells.items()
            if not cell.is_inert()
        ]
        items.sort(key=lambda item: (item[0][1], item[0][0]))
        return items

    def _bump(self) -> int:
        self.revision += 1
        return self.revision

    def _put(self, ref: CellRef, cell: Cell, sheet: Optional[str] = None) -> None:
        cells = self.sheet(sheet).cells
        if cell == Cell():
            cells.pop(addr_of(ref), None)
        else:
            cells[addr_of(ref)] = cell

    def find_map_table(self, name: str) -> Optional[MapTable]:
        for t in self.map_tables:
            if t.name == name:
                return t
        return None

    def find_fact_table(self, name: str) -> Optional[FactTable]:
        for t in self.fact_tables:
            if t.name == name:
                return t
        return None

    def resolve_symbol(self, name: str) -> Optional[int]:
        """First map table defining the symbol wins."""
        for t in self.map_tables:
            v = t.value_of(name)
            if v is not None:
                return v
        return None

    # -- cell edits ----------------------------------------------------------

    def set_cell_formula(
        self, ref: CellRef, text: str, sheet: Optional[str] = None
    ) -> int:
        """Parse and store one cell's text. On ParseError nothing changes."""
        asts = tuple(parse_cell_formula(text))
        old = self.cell(ref, sheet)
        self._put(ref, replace(old, formula_text=text if asts else "", asts=asts), sheet)
        return self._bump()

    def set_pinned(
        self, ref: CellRef, value: Optional[ValueLit], sheet: Optional[str] = None
    ) -> int:
        old = self.cell(ref, sheet)
        self._put(ref, replace(old, pinned=value), sheet)
        return self._bump()

    def copy_cell(
        self,
        src: CellRef,
        dst_range: Iterable[CellRef],
        mode: CopyMode = CopyMode.ALL_APPEND,
        index: int = 0,
        sheet: Optional[str] = None,
    ) -> int:
        """Append src's transformed constraint(s) to each destination cell.

        All-or-nothing: any out-of-grid transform aborts the whole copy.
        Constraints already present in a destination (structurally equal)
        are skipped.
        """
        src_cell = self.cell(src, sheet)
        if not src_cell.asts:
            raise BadCopyError(f"cell {src.text()} has no constraints to copy")
        if mode is CopyMode.ALL_APPEND:
            selected = src_cell.asts
        else:
            if not 0 <= index < len(src_cell.asts):
                raise BadCopyError(
                    f"constraint index {index} out of range for {src.text()}"
                )
            selected = (src_cell.asts[index],)

        dst_list = list(dst_range)
        # Transform everything first so OutOfGrid aborts before any write.
        planned = [
            (dst, [transform_for_copy(ast, src, dst) for ast in selected])
            for dst in dst_list
        ]
        for dst, moved in planned:
            cell = self.cell(dst, sheet)
            asts = list(cell.asts)
            parts = [cell.formula_text] if cell.formula_text else []
            for ast in moved:
                if ast in asts:
                    continue
                asts.append(ast)
                parts.append(format_ast(ast))
            self._put(
                dst,
                replace(cell, formula_text=";".join(parts), asts=tuple(asts)),
                sheet,
            )
        return self._bump()

    # -- tables --------------------------------------------------------------

    def define_map_table(self, table: MapTable) -> int:
        if self.find_map_table(table.name) or self.find_fact_table(table.name):
            raise DuplicateNameError(f"table {table.name!r} already defined")
        self.map_tables.append(table)
        return self._bump()

    def define_fact_table(self, table: FactTable) -> int:
        if self.find_map_table(table.name) or self.find_fact_table(table.name):
            raise DuplicateNameError(f"table {table.name!r} already defined")
        self.fact_tables.append(table)
        return self._bump()

    # -- solutions and views ---------------------------------------------------

    def set_solution(
        self, values: dict[Addr, ValueLit], sheet: Optional[str] = None
    ) -> int:
        """Overlay display values; constraint text is untouched."""
        s = self.sheet(sheet)
        for addr, cell in list(s.cells.items()):
            s.cells[addr] = replace(cell, solution_overlay=values.get(addr))
        for addr, value in values.items():
            if addr not in s.cells:
                s.cells[addr] = Cell(solution_overlay=value)
        return self._bump()

    def toggle_view(self) -> int:
        self.view_mode = (
            ViewMode.SOLUTION
            if self.view_mode is ViewMode.CONSTRAINTS
            else ViewMode.CONSTRAINTS
        )
        return self._bump()

    def set_view(self, mode: ViewMode) -> int:
        self.view_mode = mode
        return self._bump()

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> "Workbook":
        """Independent copy; Cell and table values are immutable, so a
        per-sheet dict copy is enough."""
        wb = Workbook()
        wb.sheets = [Sheet(s.name, dict(s.cells)) for s in self.sheets]
        wb.map_tables = list(self.map_tables)
        wb.fact_tables = list(self.fact_tables)
        wb.view_mode = self.view_mode
        wb.revision = self.revision
        return wb
