"""Workbook-to-CSP lowering, solution lifting, CLP(FD) text emission."""

from .emit import emit_clpfd
from .lift import (
    InversionGapError,
    SolutionShapeError,
    assignment_for_display,
    display_value_text,
    lift_solution,
    verify_display_solution,
)
from .lower import Diagnostic, LoweringError, VarMap, addr_text, lower

__all__ = [
    "Diagnostic",
    "InversionGapError",
    "LoweringError",
    "SolutionShapeError",
    "VarMap",
    "addr_text",
    "assignment_for_display",
    "display_value_text",
    "emit_clpfd",
    "lift_solution",
    "lower",
    "verify_display_solution",
]
