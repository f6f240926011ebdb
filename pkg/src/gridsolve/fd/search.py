"""Backtracking search with trail-based restoration and resumable enumeration."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Optional, Union

from .domain import Domain
from .model import Assignment, CspInstance, SolveConfig, VarOrder
from .propagate import _Store, build_watchers, run_fixpoint

# How many branching attempts between wall-clock checks.
_TIMEOUT_CHECK_INTERVAL = 256


class SearchSignal(enum.Enum):
    EXHAUSTED = "exhausted"
    TIMEOUT = "timeout"


EXHAUSTED = SearchSignal.EXHAUSTED
TIMEOUT = SearchSignal.TIMEOUT


@dataclass
class _Frame:
    var: int
    values: list[int]
    index: int  # -1 before the first value is tried
    mark: int  # trail length when the frame was opened


class SearchState:
    """Resumable depth-first search over a CspInstance.

    Single-consumer: one solve_next at a time. The state may move between
    threads between calls. Exhaustion is sticky.
    """

    def __init__(self, instance: CspInstance, config: SolveConfig = SolveConfig()):
        self.instance = instance
        self.config = config
        self._doms = list(instance.initial_domains)
        self._trail: list[tuple[int, Domain]] = []
        self._store = _Store(self._doms, self._trail)
        self._watchers = build_watchers(instance)
        self._frames: list[_Frame] = []
        self._started = False
        self._exhausted = False
        # True when the next step must undo the last decision (after a
        # yielded solution or a failed assignment).
        self._backtrack = False
        self.nodes = 0

    def _undo_to(self, mark: int) -> None:
        trail = self._trail
        while len(trail) > mark:
            var, old = trail.pop()
            self._doms[var] = old

    def _branch_var(self) -> Optional[int]:
        doms = self._doms
        if self.config.var_order is VarOrder.INPUT_ORDER:
            for v in range(len(doms)):
                if not doms[v].is_singleton():
                    return v
            return None
        best = None
        best_size = None
        for v in range(len(doms)):
            size = doms[v].size()
            if size > 1 and (best_size is None or size < best_size):
                best, best_size = v, size
                if size == 2:
                    break
        return best

    def _assign(self, var: int, value: int) -> bool:
        """Try var := value followed by propagation. Leaves failed pruning
        on the trail; callers undo to the frame mark before retrying."""
        self.nodes += 1
        if not self._store.narrow(var, Domain.singleton(value)):
            return False
        return run_fixpoint(
            self.instance, self._store, list(self._watchers[var]), self._watchers
        )

    def _start(self) -> bool:
        self._started = True
        if any(d.is_empty() for d in self._doms):
            return False
        return run_fixpoint(
            self.instance,
            self._store,
            range(len(self.instance.propagators)),
            self._watchers,
        )

    def next_solution(
        self, deadline: Optional[float] = None
    ) -> Union[Assignment, SearchSignal]:
        if self._exhausted:
            return EXHAUSTED
        if deadline is None:
            deadline = time.monotonic() + self.config.timeout_ms / 1000.0

        if not self._started:
            if not self._start():
                self._exhausted = True
                return EXHAUSTED

        next_check = self.nodes + _TIMEOUT_CHECK_INTERVAL
        while True:
            if self.nodes >= next_check:
                next_check = self.nodes + _TIMEOUT_CHECK_INTERVAL
                if time.monotonic() >= deadline:
                    return TIMEOUT

            if self._backtrack:
                advanced = False
                while self._frames:
                    if self.nodes >= next_check:
                        next_check = self.nodes + _TIMEOUT_CHECK_INTERVAL
                        if time.monotonic() >= deadline:
                            return TIMEOUT
                    frame = self._frames[-1]
                    self._undo_to(frame.mark)
                    frame.index += 1
                    if frame.index >= len(frame.values):
                        self._frames.pop()
                        continue
                    if self._assign(frame.var, frame.values[frame.index]):
                        advanced = True
                        break
                if not advanced:
                    self._exhausted = True
                    return EXHAUSTED
                self._backtrack = False
            else:
                var = self._branch_var()
                if var is None:
                    solution = tuple(d.value() for d in self._doms)
                    self._backtrack = True
                    return solution
                self._frames.append(
                    _Frame(var, list(self._doms[var].values()), -1, len(self._trail))
                )
                self._backtrack = True


def solve_next(
    state: SearchState, deadline: Optional[float] = None
) -> Union[Assignment, SearchSignal]:
    """Next assignment in search order, or EXHAUSTED / TIMEOUT."""
    return state.next_solution(deadline)


@dataclass
class SolveAllResult:
    solutions: list[Assignment] = field(default_factory=list)
    timed_out: bool = False

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)


def solve_all(instance: CspInstance, config: SolveConfig = SolveConfig()) -> SolveAllResult:
    """Collect solutions up to config.max_solutions under one shared time budget."""
    state = SearchState(instance, config)
    deadline = time.monotonic() + config.timeout_ms / 1000.0
    result = SolveAllResult()
    while len(result.solutions) < config.max_solutions:
        got = state.next_solution(deadline)
        if got is EXHAUSTED:
            break
        if got is TIMEOUT:
            result.timed_out = True
            break
        result.solutions.append(got)
    return result
