"""CSP model types: variables, linear expressions, propagator specs, instances."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

from .domain import Domain

# Variables are dense non-negative indices into the instance's domain list.
VarId = int


class Relop(enum.Enum):
    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    def holds(self, lhs: int, rhs: int) -> bool:
        op = self
        if op is Relop.EQ:
            return lhs == rhs
        if op is Relop.NE:
            return lhs != rhs
        if op is Relop.LT:
            return lhs < rhs
        if op is Relop.LE:
            return lhs <= rhs
        if op is Relop.GT:
            return lhs > rhs
        return lhs >= rhs

    def negate(self) -> "Relop":
        return _NEGATION[self]


_NEGATION = {
    Relop.EQ: Relop.NE,
    Relop.NE: Relop.EQ,
    Relop.LT: Relop.GE,
    Relop.LE: Relop.GT,
    Relop.GT: Relop.LE,
    Relop.GE: Relop.LT,
}


@dataclass(frozen=True)
class LinExpr:
    """Integer linear expression: sum of coeff*var terms plus a constant.

    Coefficients are nonzero and each variable appears at most once.
    """

    terms: tuple[tuple[int, VarId], ...]
    constant: int = 0

    @classmethod
    def build(cls, terms: Sequence[tuple[int, VarId]], constant: int = 0) -> "LinExpr":
        """Combine duplicate variables and drop zero coefficients."""
        acc: dict[VarId, int] = {}
        for coeff, var in terms:
            acc[var] = acc.get(var, 0) + coeff
        kept = tuple((c, v) for v, c in sorted(acc.items()) if c != 0)
        return cls(kept, constant)

    def evaluate(self, values: Sequence[int]) -> int:
        return self.constant + sum(c * values[v] for c, v in self.terms)

    def vars(self) -> tuple[VarId, ...]:
        return tuple(v for _, v in self.terms)


@dataclass(frozen=True)
class LinearRel:
    """expr <relop> 0."""

    expr: LinExpr
    relop: Relop

    def holds(self, values: Sequence[int]) -> bool:
        return self.relop.holds(self.expr.evaluate(values), 0)


@dataclass(frozen=True)
class AllDifferent:
    vars: tuple[VarId, ...]


@dataclass(frozen=True)
class CountRel:
    """Number of vars equal to `value` <relop> `bound`."""

    value: int
    vars: tuple[VarId, ...]
    relop: Relop
    bound: int


@dataclass(frozen=True)
class OccursAtLeastOnce:
    """Each listed value occurs at least once among the vars."""

    values: tuple[int, ...]
    vars: tuple[VarId, ...]


@dataclass(frozen=True)
class Implication:
    """Half-reified: if lhs holds then rhs must hold."""

    lhs: LinearRel
    rhs: LinearRel


@dataclass(frozen=True)
class TableIn:
    """The tuple of vars must equal one of the rows."""

    vars: tuple[VarId, ...]
    rows: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FloorDivMod:
    """y = k*q + r with 0 <= r < k (floor division by a positive constant)."""

    y: VarId
    k: int
    q: VarId
    r: VarId


PropagatorSpec = Union[
    LinearRel, AllDifferent, CountRel, OccursAtLeastOnce, Implication, TableIn, FloorDivMod
]


def spec_vars(spec: PropagatorSpec) -> tuple[VarId, ...]:
    """All variables a propagator watches."""
    if isinstance(spec, LinearRel):
        return spec.expr.vars()
    if isinstance(spec, (AllDifferent, CountRel, OccursAtLeastOnce, TableIn)):
        return spec.vars
    if isinstance(spec, Implication):
        return spec.lhs.expr.vars() + spec.rhs.expr.vars()
    if isinstance(spec, FloorDivMod):
        return (spec.y, spec.q, spec.r)
    raise TypeError(f"unknown propagator spec: {spec!r}")


@dataclass(frozen=True)
class CspInstance:
    """Immutable lowered model: domains plus propagator specifications."""

    var_count: int
    initial_domains: tuple[Domain, ...]
    propagators: tuple[PropagatorSpec, ...]

    def __post_init__(self):
        if len(self.initial_domains) != self.var_count:
            raise ValueError("initial_domains length must equal var_count")
        for spec in self.propagators:
            vs = spec_vars(spec)
            if not vs and isinstance(
                spec, (AllDifferent, CountRel, OccursAtLeastOnce, TableIn)
            ):
                raise ValueError(f"propagator has no variables: {spec!r}")
            for v in vs:
                if not 0 <= v < self.var_count:
                    raise ValueError(f"variable {v} out of range in {spec!r}")
            if isinstance(spec, FloorDivMod) and spec.k < 1:
                raise ValueError("FloorDivMod divisor must be >= 1")
            if isinstance(spec, TableIn):
                for row in spec.rows:
                    if len(row) != len(spec.vars):
                        raise ValueError("TableIn row arity mismatch")


class VarOrder(enum.Enum):
    FIRST_FAIL = "first_fail"
    INPUT_ORDER = "input_order"


class ValueOrder(enum.Enum):
    ASCENDING = "ascending"


@dataclass(frozen=True)
class SolveConfig:
    var_order: VarOrder = VarOrder.FIRST_FAIL
    value_order: ValueOrder = ValueOrder.ASCENDING
    max_solutions: int = 1000
    timeout_ms: int = 10000


# A full assignment: one integer per VarId.
Assignment = tuple[int, ...]


def check(instance: CspInstance, assignment: Sequence[int]) -> bool:
    """Direct evaluation: every value in its initial domain, every propagator's
    defining predicate true. Independent of propagation."""
    if len(assignment) != instance.var_count:
        raise ValueError(
            f"assignment has {len(assignment)} values, expected {instance.var_count}"
        )
    for value, dom in zip(assignment, instance.initial_domains):
        if not dom.contains(value):
            return False
    return all(spec_holds(spec, assignment) for spec in instance.propagators)


def spec_holds(spec: PropagatorSpec, values: Sequence[int]) -> bool:
    """The defining predicate of one propagator, evaluated directly."""
    if isinstance(spec, LinearRel):
        return spec.holds(values)
    if isinstance(spec, AllDifferent):
        got = [values[v] for v in spec.vars]
        return len(set(got)) == len(got)
    if isinstance(spec, CountRel):
        n = sum(1 for v in spec.vars if values[v] == spec.value)
        return spec.relop.holds(n, spec.bound)
    if isinstance(spec, OccursAtLeastOnce):
        present = {values[v] for v in spec.vars}
        return all(val in present for val in spec.values)
    if isinstance(spec, Implication):
        return (not spec.lhs.holds(values)) or spec.rhs.holds(values)
    if isinstance(spec, TableIn):
        return tuple(values[v] for v in spec.vars) in spec.rows
    if isinstance(spec, FloorDivMod):
        y, q, r = values[spec.y], values[spec.q], values[spec.r]
        return y == spec.k * q + r and 0 <= r < spec.k
    raise TypeError(f"unknown propagator spec: {spec!r}")
