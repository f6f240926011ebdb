"""Finite-domain constraint core: domains, propagation, backtracking search."""

from .domain import Domain
from .model import (
    AllDifferent,
    Assignment,
    CountRel,
    CspInstance,
    FloorDivMod,
    Implication,
    LinearRel,
    LinExpr,
    OccursAtLeastOnce,
    PropagatorSpec,
    Relop,
    SolveConfig,
    TableIn,
    ValueOrder,
    VarId,
    VarOrder,
    check,
    spec_holds,
    spec_vars,
)
from .propagate import propagate
from .search import (
    EXHAUSTED,
    TIMEOUT,
    SearchSignal,
    SearchState,
    SolveAllResult,
    solve_all,
    solve_next,
)

__all__ = [
    "AllDifferent",
    "Assignment",
    "CountRel",
    "CspInstance",
    "Domain",
    "EXHAUSTED",
    "FloorDivMod",
    "Implication",
    "LinExpr",
    "LinearRel",
    "OccursAtLeastOnce",
    "PropagatorSpec",
    "Relop",
    "SearchSignal",
    "SearchState",
    "SolveAllResult",
    "SolveConfig",
    "TIMEOUT",
    "TableIn",
    "ValueOrder",
    "VarId",
    "VarOrder",
    "check",
    "propagate",
    "solve_all",
    "solve_next",
    "spec_holds",
    "spec_vars",
]
