import io

import pytest

from gridsolve.formula import DomainLit, ParseError, SymbolLit, parse_cell_ref
from gridsolve.sheet import (
    BadCopyError,
    CopyMode,
    DuplicateNameError,
    FactTable,
    MapTable,
    NonBijectiveError,
    UnknownSampleError,
    ViewMode,
    Workbook,
    dumps,
    load_sample,
    loads,
    workbook_to_dict,
)
from gridsolve.formula import OutOfGridError


def ref(text):
    return parse_cell_ref(text)


def test_set_cell_formula_parses_and_stores():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "[0,0.25,0.5,1]")
    cell = wb.cell(ref("B3"))
    assert cell.formula_text == "[0,0.25,0.5,1]"
    assert len(cell.asts) == 1 and isinstance(cell.asts[0], DomainLit)


def test_set_empty_makes_cell_inert():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "[0,1]")
    wb.set_cell_formula(ref("B3"), "")
    assert wb.cell(ref("B3")).is_inert()


def test_parse_error_leaves_cell_unchanged():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "[0,1]")
    before = wb.revision
    with pytest.raises(ParseError):
        wb.set_cell_formula(ref("B3"), "COUNT(")
    assert wb.cell(ref("B3")).formula_text == "[0,1]"
    assert wb.revision == before


def test_revision_bumps_on_every_mutation():
    wb = Workbook()
    r1 = wb.set_cell_formula(ref("B3"), "[0,1]")
    r2 = wb.set_pinned(ref("B3"), SymbolLit("x_1"))
    r3 = wb.toggle_view()
    assert [r1, r2, r3] == [1, 2, 3]


def test_copy_all_append_into_range():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "[0,0.25,0.5,1]")
    wb.copy_cell(ref("B3"), [ref("C3"), ref("D3"), ref("E3")])
    for addr in ("C3", "D3", "E3"):
        assert wb.cell(ref(addr)).formula_text == "[0,0.25,0.5,1]"


def test_copy_shifts_row_sum_sideways():
    wb = Workbook()
    wb.set_cell_formula(ref("B9"), "B3+B4=1")
    wb.copy_cell(ref("B9"), [ref("C9")])
    assert wb.cell(ref("C9")).formula_text == "C3+C4=1"


def test_copy_appends_after_existing_text():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "ALLDIFFERENT([B1,B2])")
    wb.set_cell_formula(ref("C3"), "[0,1]")
    wb.copy_cell(ref("B3"), [ref("C3")])
    assert wb.cell(ref("C3")).formula_text == "[0,1];ALLDIFFERENT([C1,C2])"
    assert len(wb.cell(ref("C3")).asts) == 2


def test_copy_one_append_index_checked():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "[0,1]")
    with pytest.raises(BadCopyError):
        wb.copy_cell(ref("B3"), [ref("C3")], CopyMode.ONE_APPEND, index=2)
    with pytest.raises(BadCopyError):
        wb.copy_cell(ref("Z9"), [ref("C3")])  # nothing to copy


def test_copy_is_idempotent():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "[0,1];B3<C4")
    wb.copy_cell(ref("B3"), [ref("D5")])
    once = workbook_to_dict(wb)
    wb.copy_cell(ref("B3"), [ref("D5")])
    assert workbook_to_dict(wb) == once


def test_copy_is_all_or_nothing():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "B2=1")  # B2 shifts off-grid when moved up
    before = workbook_to_dict(wb)
    with pytest.raises(OutOfGridError):
        wb.copy_cell(ref("B3"), [ref("C3"), ref("B1")])
    assert workbook_to_dict(wb) == before


def test_map_table_bijection():
    wb = Workbook()
    wb.define_map_table(
        MapTable("Shifts", (("Morning", 1), ("Afternoon", 2), ("Evening", 3), ("Off", 4)))
    )
    assert wb.resolve_symbol("Off") == 4
    with pytest.raises(NonBijectiveError):
        MapTable("Bad", (("a", 2), ("b", 2)))
    with pytest.raises(DuplicateNameError):
        wb.define_map_table(MapTable("Shifts", ()))
    wb.define_map_table(MapTable("Empty", ()))  # vacuous is fine


def test_view_toggle_preserves_formula_text():
    wb = load_sample("ta")
    texts = {addr: cell.formula_text for addr, cell in wb.constrained_cells()}
    wb.set_solution({(2, 3): SymbolLit("x_1")})
    wb.toggle_view()
    assert wb.view_mode is ViewMode.SOLUTION
    wb.toggle_view()
    assert wb.view_mode is ViewMode.CONSTRAINTS
    assert {a: c.formula_text for a, c in wb.constrained_cells()} == texts


def test_double_toggle_is_identity_on_mode():
    wb = Workbook()
    mode = wb.view_mode
    wb.toggle_view()
    wb.toggle_view()
    assert wb.view_mode is mode


def test_serialization_round_trip():
    wb = load_sample("employee")
    text = dumps(wb)
    back = loads(text)
    assert workbook_to_dict(back) == workbook_to_dict(wb)
    # canonical files reload byte-identically
    assert dumps(back) == text


def test_load_rejects_bad_documents():
    from gridsolve.sheet import WorkbookLoadError

    with pytest.raises(WorkbookLoadError):
        loads("not json")
    with pytest.raises(WorkbookLoadError):
        loads('{"version": 99, "sheets": []}')
    with pytest.raises(WorkbookLoadError) as err:
        loads(
            '{"version": 1, "sheets": [{"name": "S", "cells": {"B3": {"formula": "COUNT("}}}]}'
        )
    assert err.value.cell == "B3"


def test_pinned_value_survives_round_trip():
    wb = Workbook()
    wb.set_cell_formula(ref("B3"), "[0,0.25]")
    wb.set_pinned(ref("B3"), __import__("gridsolve.formula", fromlist=["DecLit"]).DecLit(1, 4))
    back = loads(dumps(wb))
    assert back.cell(ref("B3")).pinned == wb.cell(ref("B3")).pinned


def test_unknown_sample():
    with pytest.raises(UnknownSampleError):
        load_sample("nope")


def test_samples_have_expected_shape():
    ta = load_sample("ta")
    assert len(ta.constrained_cells()) == 34  # 24 grid + 6 row counts + 4 col sums
    employee = load_sample("employee")
    assert len(employee.constrained_cells()) == 47  # 35 grid + 7 day + 5 manager
    assert employee.find_map_table("Shifts") is not None
    sendmory = load_sample("sendmory")
    assert len(sendmory.constrained_cells()) == 18
