"""Exact algebra of finite unions of half-open real intervals.

An :class:`IntervalSet` is a finite union of disjoint intervals
``[left, right)``, kept sorted and normalized.  These are the only sets the
rest of the package ever measures, intersects or pulls back, so all set
operations here are exact up to floating endpoint arithmetic.

Normalization merges neighbouring intervals whose gap is below
``MERGE_GAP``; this prevents measure drift when long chains of set
operations produce spurious hairline gaps.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Sequence

import numpy as np

# Gap below which adjacent intervals are fused during normalization.
MERGE_GAP = 1e-15
# Tolerance for endpoint comparisons in validation and equality checks.
ENDPOINT_TOL = 1e-12

_INTERVAL_RE = re.compile(r"\[\s*([^,\s\]]+)\s*,\s*([^)\s]+)\s*\)")


def _normalize(raw, *, reject_overlap: bool) -> tuple[tuple[float, float], ...]:
    ivs = []
    for left, right in raw:
        left = float(left)
        right = float(right)
        if not (math.isfinite(left) and math.isfinite(right)):
            raise ValueError("interval endpoints must be finite")
        if right <= left:
            raise ValueError(f"empty or reversed interval [{left}, {right})")
        ivs.append((left, right))
    ivs.sort()
    merged: list[list[float]] = []
    for left, right in ivs:
        if merged and left < merged[-1][1] - ENDPOINT_TOL:
            if reject_overlap:
                raise ValueError(
                    f"overlapping intervals at [{left}, {right})"
                )
            merged[-1][1] = max(merged[-1][1], right)
        elif merged and left - merged[-1][1] < MERGE_GAP:
            merged[-1][1] = max(merged[-1][1], right)
        else:
            merged.append([left, right])
    return tuple((a, b) for a, b in merged)


class IntervalSet:
    """Sorted finite union of disjoint half-open intervals."""

    __slots__ = ("_ivs", "_edges")

    def __init__(self, intervals: Iterable[Sequence[float]] = (), *,
                 reject_overlap: bool = False):
        self._ivs = _normalize(intervals, reject_overlap=reject_overlap)
        self._edges = None

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def from_string(cls, text: str) -> "IntervalSet":
        """Parse ``"[0,1) [2,3.5)"``.  Overlapping intervals are rejected."""
        text = text.strip()
        if not text:
            return cls.empty()
        matched = _INTERVAL_RE.findall(text)
        leftover = _INTERVAL_RE.sub("", text).strip()
        if not matched or leftover:
            raise ValueError(f"cannot parse interval set {text!r}")
        return cls([(float(a), float(b)) for a, b in matched],
                   reject_overlap=True)

    def to_string(self) -> str:
        return " ".join(f"[{a:.17g},{b:.17g})" for a, b in self._ivs)

    # -- basic queries ----------------------------------------------------

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        return self._ivs

    @property
    def is_empty(self) -> bool:
        return not self._ivs

    @property
    def total_length(self) -> float:
        """Lebesgue measure: sum of interval lengths."""
        return float(sum(b - a for a, b in self._ivs))

    def count_integers(self) -> int:
        """Counting measure: number of integers contained in the set."""
        return sum(max(0, math.ceil(b) - math.ceil(a)) for a, b in self._ivs)

    def sites(self) -> np.ndarray:
        """Integers contained in the set, ascending."""
        out = [np.arange(math.ceil(a), math.ceil(b)) for a, b in self._ivs]
        if not out:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(out)

    @property
    def edges(self) -> np.ndarray:
        """Flattened endpoint array; a point x is inside iff
        ``searchsorted(edges, x, 'right')`` is odd."""
        if self._edges is None:
            self._edges = np.array(
                [e for iv in self._ivs for e in iv], dtype=np.float64)
        return self._edges

    def contains_points(self, xs: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.edges, np.asarray(xs, dtype=np.float64),
                              side="right")
        return (idx % 2).astype(bool)

    def count_points(self, xs: np.ndarray) -> int:
        return int(np.count_nonzero(self.contains_points(xs)))

    def hull(self) -> tuple[float, float]:
        if not self._ivs:
            raise ValueError("empty set has no hull")
        return self._ivs[0][0], self._ivs[-1][1]

    # -- set algebra -------------------------------------------------------

    def translate(self, dx: float) -> "IntervalSet":
        return IntervalSet([(a + dx, b + dx) for a, b in self._ivs])

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._ivs + other._ivs)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep(self, other, lambda a, b: a and b)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep(self, other, lambda a, b: a and not b)

    def symmetric_difference(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep(self, other, lambda a, b: a != b)

    def contains_set(self, other: "IntervalSet") -> bool:
        return other.difference(self).total_length <= ENDPOINT_TOL

    def approx_equal(self, other: "IntervalSet",
                     tol: float = ENDPOINT_TOL) -> bool:
        return self.symmetric_difference(other).total_length <= tol

    # -- plumbing ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self._ivs == other._ivs

    def __hash__(self):
        return hash(self._ivs)

    def __iter__(self):
        return iter(self._ivs)

    def __len__(self):
        return len(self._ivs)

    def __repr__(self):
        return f"IntervalSet({self.to_string() or 'empty'})"

    # pickling support: _edges cache is rebuilt lazily
    def __getstate__(self):
        return self._ivs

    def __setstate__(self, state):
        self._ivs = state
        self._edges = None


def _sweep(a: IntervalSet, b: IntervalSet, keep) -> IntervalSet:
    """Boundary sweep evaluating a boolean combination of two sets."""
    events = []
    for left, right in a.intervals:
        events.append((left, 0, 1))
        events.append((right, 0, -1))
    for left, right in b.intervals:
        events.append((left, 1, 1))
        events.append((right, 1, -1))
    events.sort()
    out = []
    depth = [0, 0]
    open_left = None
    i = 0
    n = len(events)
    while i < n:
        x = events[i][0]
        while i < n and events[i][0] == x:
            _, which, delta = events[i]
            depth[which] += delta
            i += 1
        inside = keep(depth[0] > 0, depth[1] > 0)
        if inside and open_left is None:
            open_left = x
        elif not inside and open_left is not None:
            if x > open_left:
                out.append((open_left, x))
            open_left = None
    return IntervalSet(out)


def random_interval_set(rng: np.random.Generator, *, max_pieces: int = 4,
                        low: float = -10.0, high: float = 10.0,
                        min_len: float = 0.05) -> IntervalSet:
    """Small random interval union for test batteries."""
    pieces = int(rng.integers(1, max_pieces + 1))
    cuts = np.sort(rng.uniform(low, high, size=2 * pieces))
    ivs = []
    for j in range(pieces):
        a, b = cuts[2 * j], cuts[2 * j + 1]
        if b - a >= min_len:
            ivs.append((a, b))
    if not ivs:
        ivs = [(float(cuts[0]), float(cuts[0]) + min_len)]
    return IntervalSet(ivs)
