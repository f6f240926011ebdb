"""Constraint propagation to fixpoint.

Each propagator filters domains at its own consistency level:
bounds consistency for linear relations, value elimination for
alldifferent, counting bounds for cardinality, generalized arc
consistency for tables. All filters are exact on fully assigned
variables, which is what search relies on at the leaves.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Sequence

from .domain import Domain
from .model import (
    AllDifferent,
    CountRel,
    CspInstance,
    FloorDivMod,
    Implication,
    LinearRel,
    LinExpr,
    OccursAtLeastOnce,
    PropagatorSpec,
    Relop,
    TableIn,
    spec_vars,
)

# Entailment states for half-reified implication.
_TRUE, _FALSE, _UNKNOWN = 1, 0, -1


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class _Store:
    """Mutable domain store with optional trailing for backtracking."""

    def __init__(self, doms: list[Domain], trail: Optional[list] = None):
        self.doms = doms
        self.trail = trail
        self.changed: list[int] = []

    def narrow(self, var: int, new: Domain) -> bool:
        """Replace var's domain; records the old one on the trail.
        Returns False when the new domain is empty."""
        old = self.doms[var]
        if new.intervals == old.intervals:
            return True
        if self.trail is not None:
            self.trail.append((var, old))
        self.doms[var] = new
        self.changed.append(var)
        return not new.is_empty()


def _expr_bounds(expr: LinExpr, doms: Sequence[Domain]) -> tuple[int, int]:
    lo = hi = expr.constant
    for c, v in expr.terms:
        d = doms[v]
        if c > 0:
            lo += c * d.min_value()
            hi += c * d.max_value()
        else:
            lo += c * d.max_value()
            hi += c * d.min_value()
    return lo, hi


def _entailment(rel: LinearRel, doms: Sequence[Domain]) -> int:
    for _, v in rel.expr.terms:
        if doms[v].is_empty():
            return _UNKNOWN
    lo, hi = _expr_bounds(rel.expr, doms)
    op = rel.relop
    if op is Relop.EQ:
        if lo == hi == 0:
            return _TRUE
        if lo > 0 or hi < 0:
            return _FALSE
    elif op is Relop.NE:
        if lo > 0 or hi < 0:
            return _TRUE
        if lo == hi == 0:
            return _FALSE
    elif op is Relop.LE:
        if hi <= 0:
            return _TRUE
        if lo > 0:
            return _FALSE
    elif op is Relop.LT:
        if hi < 0:
            return _TRUE
        if lo >= 0:
            return _FALSE
    elif op is Relop.GE:
        if lo >= 0:
            return _TRUE
        if hi < 0:
            return _FALSE
    elif op is Relop.GT:
        if lo > 0:
            return _TRUE
        if hi <= 0:
            return _FALSE
    return _UNKNOWN


def _canonical_linear(rel: LinearRel) -> LinearRel:
    """Rewrite GT/GE/LT into LE (or keep EQ/NE) so pruning handles 3 cases."""
    expr, op = rel.expr, rel.relop
    if op in (Relop.GT, Relop.GE):
        expr = LinExpr(tuple((-c, v) for c, v in expr.terms), -expr.constant)
        op = Relop.LT if op is Relop.GT else Relop.LE
    if op is Relop.LT:
        expr = LinExpr(expr.terms, expr.constant + 1)
        op = Relop.LE
    return LinearRel(expr, op)


def _prune_linear(rel: LinearRel, store: _Store) -> bool:
    rel = _canonical_linear(rel)
    expr, op = rel.expr, rel.relop
    doms = store.doms

    if not expr.terms:
        return op.holds(expr.constant, 0)

    lo, hi = _expr_bounds(expr, doms)
    if op is Relop.EQ:
        if lo > 0 or hi < 0:
            return False
        for c, v in expr.terms:
            d = doms[v]
            # Bounds of the rest of the expression if this term is removed.
            if c > 0:
                rest_lo = lo - c * d.min_value()
                rest_hi = hi - c * d.max_value()
            else:
                rest_lo = lo - c * d.max_value()
                rest_hi = hi - c * d.min_value()
            # c*x = -rest, rest in [rest_lo, rest_hi]
            if c > 0:
                new = d.clamp(_ceil_div(-rest_hi, c), _floor_div(-rest_lo, c))
            else:
                new = d.clamp(_ceil_div(-rest_lo, c), _floor_div(-rest_hi, c))
            if not store.narrow(v, new):
                return False
    elif op is Relop.LE:
        if lo > 0:
            return False
        for c, v in expr.terms:
            d = doms[v]
            if c > 0:
                rest_lo = lo - c * d.min_value()
                new = d.remove_above(_floor_div(-rest_lo, c))
            else:
                rest_lo = lo - c * d.max_value()
                new = d.remove_below(_ceil_div(-rest_lo, c))
            if not store.narrow(v, new):
                return False
    else:  # NE: prune only once a single variable remains free
        free = [(c, v) for c, v in expr.terms if not doms[v].is_singleton()]
        if not free:
            return lo != 0 or hi != 0
        if len(free) == 1:
            c, v = free[0]
            rest = expr.constant + sum(
                cc * doms[vv].value() for cc, vv in expr.terms if vv != v
            )
            if rest % c == 0:
                if not store.narrow(v, doms[v].remove_value(-rest // c)):
                    return False
    return True


def _prune_alldifferent(spec: AllDifferent, store: _Store) -> bool:
    doms = store.doms
    fixed: dict[int, int] = {}
    for v in spec.vars:
        d = doms[v]
        if d.is_singleton():
            val = d.value()
            if val in fixed and fixed[val] != v:
                return False
            fixed[val] = v
    if not fixed:
        return True
    for v in spec.vars:
        d = doms[v]
        if d.is_singleton():
            continue
        new = d
        for val, owner in fixed.items():
            if owner != v:
                new = new.remove_value(val)
        if not store.narrow(v, new):
            return False
    return True


def _count_bounds(spec: CountRel, doms) -> tuple[int, int, list[int]]:
    """(n fixed to value, n that may take value, undecided vars containing it)."""
    lower = upper = 0
    undecided = []
    for v in spec.vars:
        d = doms[v]
        if not d.contains(spec.value):
            continue
        upper += 1
        if d.is_singleton():
            lower += 1
        else:
            undecided.append(v)
    return lower, upper, undecided


def _prune_count(spec: CountRel, store: _Store) -> bool:
    # Normalize strict bounds so only EQ / NE / LE / GE remain.
    if spec.relop is Relop.LT:
        spec = CountRel(spec.value, spec.vars, Relop.LE, spec.bound - 1)
    elif spec.relop is Relop.GT:
        spec = CountRel(spec.value, spec.vars, Relop.GE, spec.bound + 1)

    doms = store.doms
    lower, upper, undecided = _count_bounds(spec, doms)
    op, b = spec.relop, spec.bound

    def exclude_rest() -> bool:
        for v in undecided:
            if not store.narrow(v, doms[v].remove_value(spec.value)):
                return False
        return True

    def force_rest() -> bool:
        for v in undecided:
            if not store.narrow(v, doms[v].intersect(Domain.singleton(spec.value))):
                return False
        return True

    if op is Relop.EQ:
        if lower > b or upper < b:
            return False
        if lower == b:
            return exclude_rest()
        if upper == b:
            return force_rest()
    elif op is Relop.LE:
        if lower > b:
            return False
        if lower == b:
            return exclude_rest()
    elif op is Relop.GE:
        if upper < b:
            return False
        if upper == b:
            return force_rest()
    elif op is Relop.NE:
        if lower == upper == b:
            return False
        if len(undecided) == 1:
            if lower == b:  # the last undecided var must take the value
                return force_rest()
            if upper == b:  # or must avoid it
                return exclude_rest()
    return True


def _prune_occurs(spec: OccursAtLeastOnce, store: _Store) -> bool:
    doms = store.doms
    for val in spec.values:
        supports = [v for v in spec.vars if doms[v].contains(val)]
        if not supports:
            return False
        if len(supports) == 1 and not doms[supports[0]].is_singleton():
            v = supports[0]
            if not store.narrow(v, doms[v].intersect(Domain.singleton(val))):
                return False
    return True


def _prune_implication(spec: Implication, store: _Store) -> bool:
    lhs_state = _entailment(spec.lhs, store.doms)
    if lhs_state == _TRUE:
        return _prune_linear(spec.rhs, store)
    if lhs_state == _FALSE:
        return True
    if _entailment(spec.rhs, store.doms) == _FALSE:
        # Contrapositive: rhs impossible forces lhs false.
        return _prune_linear(LinearRel(spec.lhs.expr, spec.lhs.relop.negate()), store)
    return True


def _prune_table(spec: TableIn, store: _Store) -> bool:
    doms = store.doms
    live = [
        row
        for row in spec.rows
        if all(doms[v].contains(val) for v, val in zip(spec.vars, row))
    ]
    if not live:
        return False
    for i, v in enumerate(spec.vars):
        allowed = {row[i] for row in live}
        new = doms[v].intersect(Domain.from_values(allowed))
        if not store.narrow(v, new):
            return False
    return True


def _prune_divmod(spec: FloorDivMod, store: _Store) -> bool:
    # Always narrow against the *current* domain of the target: y, q and r
    # may alias the same variable, and clamping a stale snapshot could
    # re-widen it and lose the fixpoint guarantee.
    doms = store.doms
    k = spec.k
    if not store.narrow(spec.r, doms[spec.r].clamp(0, k - 1)):
        return False
    dq, dr = doms[spec.q], doms[spec.r]
    if not store.narrow(
        spec.y,
        doms[spec.y].clamp(
            k * dq.min_value() + dr.min_value(), k * dq.max_value() + dr.max_value()
        ),
    ):
        return False
    dy, dr = doms[spec.y], doms[spec.r]
    if not store.narrow(
        spec.q,
        doms[spec.q].clamp(
            _ceil_div(dy.min_value() - dr.max_value(), k),
            _floor_div(dy.max_value() - dr.min_value(), k),
        ),
    ):
        return False
    dy, dq = doms[spec.y], doms[spec.q]
    if not store.narrow(
        spec.r,
        doms[spec.r].clamp(
            dy.min_value() - k * dq.max_value(), dy.max_value() - k * dq.min_value()
        ),
    ):
        return False
    return True


def prune(spec: PropagatorSpec, store: _Store) -> bool:
    if isinstance(spec, LinearRel):
        return _prune_linear(spec, store)
    if isinstance(spec, AllDifferent):
        return _prune_alldifferent(spec, store)
    if isinstance(spec, CountRel):
        return _prune_count(spec, store)
    if isinstance(spec, OccursAtLeastOnce):
        return _prune_occurs(spec, store)
    if isinstance(spec, Implication):
        return _prune_implication(spec, store)
    if isinstance(spec, TableIn):
        return _prune_table(spec, store)
    if isinstance(spec, FloorDivMod):
        return _prune_divmod(spec, store)
    raise TypeError(f"unknown propagator spec: {spec!r}")


def build_watchers(instance: CspInstance) -> list[list[int]]:
    watchers: list[list[int]] = [[] for _ in range(instance.var_count)]
    for idx, spec in enumerate(instance.propagators):
        for v in sorted(set(spec_vars(spec))):
            watchers[v].append(idx)
    return watchers


def run_fixpoint(
    instance: CspInstance,
    store: _Store,
    queue_init: Sequence[int],
    watchers: list[list[int]],
) -> bool:
    """Run the given propagators (and everything they wake) to fixpoint."""
    queue = deque(queue_init)
    queued = set(queue_init)
    while queue:
        idx = queue.popleft()
        queued.discard(idx)
        store.changed.clear()
        if not prune(instance.propagators[idx], store):
            return False
        for v in store.changed:
            for w in watchers[v]:
                if w not in queued:
                    queued.add(w)
                    queue.append(w)
    return True


def propagate(
    instance: CspInstance, domains: Sequence[Domain]
) -> Optional[list[Domain]]:
    """Propagate all constraints to fixpoint.

    Returns the narrowed domains, or None if some domain became empty.
    The result is always a fresh list; the input is not modified.
    """
    if len(domains) != instance.var_count:
        raise ValueError("domains length must equal var_count")
    doms = list(domains)
    if any(d.is_empty() for d in doms):
        return None
    store = _Store(doms)
    watchers = build_watchers(instance)
    ok = run_fixpoint(instance, store, range(len(instance.propagators)), watchers)
    return doms if ok else None
