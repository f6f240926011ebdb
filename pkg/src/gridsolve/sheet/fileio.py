"""Workbook file format (versioned JSON, canonical key order on save).

{
  "version": 1,
  "sheets": [ { "name": "Sheet1",
                "cells": { "B3": {"formula": "[0,0.25,0.5,1]", "pinned": null} } } ],
  "map_tables": [ {"name": "Shifts", "entries": [["Morning", 1], ["Off", 4]]} ],
  "fact_tables": [ {"name": "skill", "arity": 2, "rows": [["TA1", 1]]} ]
}

Cell keys are A1 addresses; absent cells are inert. Pinned values are
written as literal text ("Morning", "0.25", "7").
"""

from __future__ import annotations

import json
from typing import IO, Union

from ..formula import (
    CellRef,
    ParseError,
    col_to_letters,
    format_value,
    parse_cell_formula,
    parse_cell_ref,
)
from ..formula.parser import parse_value_literal
from .model import Cell, FactTable, MapTable, Sheet, ViewMode, Workbook, WorkbookError

FORMAT_VERSION = 1


class WorkbookLoadError(WorkbookError):
    def __init__(self, message: str, cell: str = ""):
        super().__init__(message)
        self.cell = cell


def workbook_to_dict(wb: Workbook) -> dict:
    sheets = []
    for sheet in wb.sheets:
        cells = {}
        for (col, row), cell in sheet.cells.items():
            if not cell.formula_text and cell.pinned is None:
                continue
            cells[f"{col_to_letters(col)}{row}"] = {
                "formula": cell.formula_text,
                "pinned": format_value(cell.pinned) if cell.pinned is not None else None,
            }
        sheets.append({"name": sheet.name, "cells": cells})
    return {
        "version": FORMAT_VERSION,
        "sheets": sheets,
        "map_tables": [
            {"name": t.name, "entries": [[s, n] for s, n in t.entries]}
            for t in wb.map_tables
        ],
        "fact_tables": [
            {"name": t.name, "arity": t.arity, "rows": [list(r) for r in t.rows]}
            for t in wb.fact_tables
        ],
    }


def dumps(wb: Workbook) -> str:
    return json.dumps(workbook_to_dict(wb), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save(wb: Workbook, fp: Union[str, IO[str]]) -> None:
    if isinstance(fp, str):
        with open(fp, "w", encoding="utf-8") as f:
            f.write(dumps(wb))
    else:
        fp.write(dumps(wb))


def _require(cond: bool, message: str, cell: str = "") -> None:
    if not cond:
        raise WorkbookLoadError(message, cell)


def workbook_from_dict(doc: dict) -> Workbook:
    _require(isinstance(doc, dict), "workbook file must be a JSON object")
    _require(doc.get("version") == FORMAT_VERSION, "unsupported workbook version")
    wb = Workbook()
    wb.sheets = []
    sheets = doc.get("sheets", [])
    _require(isinstance(sheets, list) and sheets, "workbook needs at least one sheet")
    for raw_sheet in sheets:
        _require(isinstance(raw_sheet, dict), "sheet entries must be objects")
        sheet = Sheet(str(raw_sheet.get("name", "Sheet1")))
        raw_cells = raw_sheet.get("cells", {})
        _require(isinstance(raw_cells, dict), "cells must be an object")
        for key, raw_cell in raw_cells.items():
            try:
                ref = parse_cell_ref(key)
            except ParseError as err:
                raise WorkbookLoadError(f"bad cell address {key!r}: {err}", key)
            _require(isinstance(raw_cell, dict), "cell entries must be objects", key)
            formula = raw_cell.get("formula") or ""
            pinned_raw = raw_cell.get("pinned")
            pinned = None
            if pinned_raw is not None:
                if isinstance(pinned_raw, (int, float)):
                    pinned_raw = repr(pinned_raw)
                try:
                    pinned = parse_value_literal(str(pinned_raw))
                except ParseError as err:
                    raise WorkbookLoadError(
                        f"bad pinned value in {key}: {err}", key
                    )
            try:
                asts = tuple(parse_cell_formula(formula))
            except ParseError as err:
                raise WorkbookLoadError(f"bad formula in {key}: {err}", key)
            cell = Cell(formula if asts else "", asts, pinned)
            if not cell.is_inert():
                sheet.cells[(ref.col, ref.row)] = cell
        wb.sheets.append(sheet)

    for raw in doc.get("map_tables", []):
        _require(isinstance(raw, dict), "map table entries must be objects")
        entries = []
        for pair in raw.get("entries", []):
            _require(
                isinstance(pair, list) and len(pair) == 2, "map entries are [symbol, int]"
            )
            symbol, number = pair
            _require(isinstance(symbol, str), "map symbols must be strings")
            _require(isinstance(number, int), "map values must be integers")
            entries.append((symbol, number))
        wb.define_map_table(MapTable(str(raw.get("name", "")), tuple(entries)))

    for raw in doc.get("fact_tables", []):
        _require(isinstance(raw, dict), "fact table entries must be objects")
        rows = []
        for row in raw.get("rows", []):
            _require(isinstance(row, list), "fact rows must be arrays")
            for item in row:
                _require(
                    isinstance(item, (int, str)),
                    "fact row entries must be integers or symbols",
                )
            rows.append(tuple(row))
        wb.define_fact_table(
            FactTable(str(raw.get("name", "")), int(raw.get("arity", 0)), tuple(rows))
        )

    wb.view_mode = ViewMode.CONSTRAINTS
    wb.revision = 0
    return wb


def loads(text: str) -> Workbook:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise WorkbookLoadError(f"not valid JSON: {err}")
    return workbook_from_dict(doc)


def load(fp: Union[str, IO[str]]) -> Workbook:
    if isinstance(fp, str):
        with open(fp, "r", encoding="utf-8") as f:
            return loads(f.read())
    return loads(fp.read())
