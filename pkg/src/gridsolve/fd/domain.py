"""Finite integer domains stored as normalized, disjoint, sorted intervals."""

from __future__ import annotations

from typing import Iterable, Iterator


class Domain:
    """Immutable set of integers, kept as sorted (lo, hi) intervals.

    Normal form: lo <= hi in each interval, intervals ascending, and a gap
    of at least 2 between consecutive intervals (adjacent intervals merge).
    The empty domain is valid and signals failure during propagation.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple[int, int]] = ()):
        self.intervals: tuple[tuple[int, int], ...] = _normalize(intervals)

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "Domain":
        return cls((v, v) for v in values)

    @classmethod
    def interval(cls, lo: int, hi: int) -> "Domain":
        return cls([(lo, hi)] if lo <= hi else [])

    @classmethod
    def singleton(cls, value: int) -> "Domain":
        return cls([(value, value)])

    @classmethod
    def empty(cls) -> "Domain":
        return cls()

    def is_empty(self) -> bool:
        return not self.intervals

    def is_singleton(self) -> bool:
        ivs = self.intervals
        return len(ivs) == 1 and ivs[0][0] == ivs[0][1]

    def size(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def min_value(self) -> int:
        if not self.intervals:
            raise ValueError("empty domain has no minimum")
        return self.intervals[0][0]

    def max_value(self) -> int:
        if not self.intervals:
            raise ValueError("empty domain has no maximum")
        return self.intervals[-1][1]

    def value(self) -> int:
        """The single value of a singleton domain."""
        if not self.is_singleton():
            raise ValueError("domain is not a singleton")
        return self.intervals[0][0]

    def contains(self, value: int) -> bool:
        for lo, hi in self.intervals:
            if lo <= value <= hi:
                return True
            if value < lo:
                return False
        return False

    def values(self) -> Iterator[int]:
        for lo, hi in self.intervals:
            yield from range(lo, hi + 1)

    def intersect(self, other: "Domain") -> "Domain":
        out = []
        a, b = self.intervals, other.intervals
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return _raw(out)

    def remove_value(self, value: int) -> "Domain":
        out = []
        for lo, hi in self.intervals:
            if value < lo or value > hi:
                out.append((lo, hi))
                continue
            if lo <= value - 1:
                out.append((lo, value - 1))
            if value + 1 <= hi:
                out.append((value + 1, hi))
        return _raw(out)

    def remove_below(self, bound: int) -> "Domain":
        """Keep only values >= bound."""
        out = []
        for lo, hi in self.intervals:
            if hi < bound:
                continue
            out.append((max(lo, bound), hi))
        return _raw(out)

    def remove_above(self, bound: int) -> "Domain":
        """Keep only values <= bound."""
        out = []
        for lo, hi in self.intervals:
            if lo > bound:
                break
            out.append((lo, min(hi, bound)))
        return _raw(out)

    def clamp(self, lo: int, hi: int) -> "Domain":
        return self.remove_below(lo).remove_above(hi)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Domain) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __len__(self) -> int:
        return self.size()

    def __iter__(self) -> Iterator[int]:
        return self.values()

    def __contains__(self, value: int) -> bool:
        return self.contains(value)

    def __repr__(self) -> str:
        parts = []
        for lo, hi in self.intervals:
            parts.append(str(lo) if lo == hi else f"{lo}..{hi}")
        return "Domain({%s})" % ", ".join(parts)


def _normalize(intervals: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    pairs = sorted((lo, hi) for lo, hi in intervals if lo <= hi)
    merged: list[tuple[int, int]] = []
    for lo, hi in pairs:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def _raw(intervals: list[tuple[int, int]]) -> Domain:
    # Intervals built by the ops above are already normalized; skip re-sorting.
    d = Domain.__new__(Domain)
    d.intervals = tuple(intervals)
    return d
