"""Shipped sample problems: employee scheduling, TA assignment, SEND+MORE=MONEY."""

from __future__ import annotations

from ..formula import col_to_letters, parse_cell_ref
from .model import MapTable, UnknownSampleError, Workbook

SAMPLE_NAMES = ("employee", "ta", "sendmory")


def _set(wb: Workbook, addr: str, text: str) -> None:
    wb.set_cell_formula(parse_cell_ref(addr), text)


def build_sendmory() -> Workbook:
    """SEND + MORE = MONEY as a carry/digit grid.

    Columns B..E are the thousands..units columns; row 2 holds the carries
    into each column, rows 3 and 4 the addend digits, row 5 (with A5 as the
    leading digit) the sum digits. Same-letter cells are tied by equalities,
    and the eight distinct letters must all differ.
    """
    wb = Workbook()
    # carries; E2 is the carry into the units column, always 0
    _set(wb, "B2", "[0,1]; B2=(C2+C3+C4)/10")
    _set(wb, "C2", "[0,1]; C2=(D2+D3+D4)/10")
    _set(wb, "D2", "[0,1]; D2=(E2+E3+E4)/10")
    _set(wb, "E2", "[0]")
    # S E N D  (leading digit nonzero)
    _set(wb, "B3", "[1..9]")
    _set(wb, "C3", "[0..9]; C3=D5")
    _set(wb, "D3", "[0..9]")
    _set(wb, "E3", "[0..9]")
    # M O R E  (leading digit nonzero)
    _set(wb, "B4", "[1..9]; B4=A5")
    _set(wb, "C4", "[0..9]")
    _set(wb, "D4", "[0..9]")
    _set(wb, "E4", "[0..9]; E4=C3")
    # M O N E Y
    _set(wb, "A5", "[1]; A5=(B2+B3+B4)/10")
    _set(wb, "B5", "B5=(B2+B3+B4)MOD10; [0..9]; B5=C4")
    _set(wb, "C5", "C5=(C2+C3+C4)MOD10; [0..9]; C5=D3")
    _set(wb, "D5", "D5=(D2+D3+D4)MOD10; [0..9]")
    _set(wb, "E5", "E5=(E2+E3+E4)MOD10; [0..9]")
    # one cell per distinct letter: S E N D M O R Y
    _set(wb, "A2", "ALLDIFFERENT([B3,C3,D3,E3,B4,C4,D4,E5])")
    wb.revision = 0
    return wb


def build_ta() -> Workbook:
    """TA assignment: courses in rows 3..8, TAs in columns B..E.

    Course loads are 0 / 0.25 / 0.5 / 1; TA-2 and TA-3 cannot take a full
    course. Each course needs at least one TA (fewer than four zeros per
    row), each TA gives exactly 1.0 in total, and nobody teaches more than
    three quarter-courses.
    """
    wb = Workbook()
    wide = "[0,0.25,0.5,1]"
    narrow = "[0,0.25,0.5]"
    for row in range(3, 9):
        _set(wb, f"B{row}", wide)
        _set(wb, f"C{row}", narrow)
        _set(wb, f"D{row}", narrow)
        _set(wb, f"E{row}", wide)
        _set(wb, f"F{row}", f"COUNT(0,[B{row},C{row},D{row},E{row}],<,4)")
    for col in "BCDE":
        cells = ",".join(f"{col}{row}" for row in range(3, 9))
        _set(
            wb,
            f"{col}9",
            f"{col}3+{col}4+{col}5+{col}6+{col}7+{col}8=1;COUNT(0.25,[{cells}],<=,3)",
        )
    wb.revision = 0
    return wb


def build_employee() -> Workbook:
    """Weekly shifts for five managers (rows 2..6) over seven days (B..H).

    Every cell takes one of Morning/Afternoon/Evening/Off. An Evening is
    never followed by the next day's Morning; every day has Morning and
    Evening covered; every manager gets exactly two days off and works at
    least one shift of each kind.
    """
    wb = Workbook()
    wb.define_map_table(
        MapTable(
            "Shifts",
            (("Morning", 1), ("Afternoon", 2), ("Evening", 3), ("Off", 4)),
        )
    )
    domain = "[Morning,Afternoon,Evening,Off]"
    first_col, last_col = 2, 8  # B..H
    for row in range(2, 7):
        for col in range(first_col, last_col + 1):
            here = f"{col_to_letters(col)}{row}"
            text = domain
            if col < last_col:
                right = f"{col_to_letters(col + 1)}{row}"
                text += f";IF({here}=Evening)THEN({right}!=Morning)"
            _set(wb, here, text)
    for col in range(first_col, last_col + 1):
        letters = col_to_letters(col)
        day = f"[{letters}2:{letters}6]"
        _set(wb, f"{letters}7", f"MEMBER(Morning,{day});MEMBER(Evening,{day})")
    for row in range(2, 7):
        week = f"[B{row}:H{row}]"
        _set(
            wb,
            f"I{row}",
            f"COUNT(Off,{week},=,2);SUBLIST([Morning,Afternoon,Evening],{week})",
        )
    wb.revision = 0
    return wb


_BUILDERS = {
    "employee": build_employee,
    "ta": build_ta,
    "sendmory": build_sendmory,
}


def load_sample(name: str) -> Workbook:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownSampleError(
            f"unknown sample {name!r}; available: {', '.join(SAMPLE_NAMES)}"
        )
    return builder()
