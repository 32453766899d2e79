"""Concrete sigma-finite measure preserving systems with exact preimages.

Three realizations are provided:

* :class:`IntegerTranslation` -- the integer lattice with counting measure,
  shifted by a fixed step.  Dissipative; every finite set is wandering.
* :class:`BooleMap` -- ``x -> x - 1/x`` on the real line with Lebesgue
  measure.  A classical conservative, measure preserving 2-to-1 map; exact
  preimages come from the branch roots ``x = (y +/- sqrt(y^2+4))/2``.
* :class:`RankOneTower` -- a cutting-and-stacking column built to a finite
  stage.  The map climbs one level; it is deliberately partial near the top
  and operations fail loudly with :class:`~poissonlab.errors.DomainEscape`
  instead of silently extending the construction.

All systems expose ``measure``, ``preimage`` (the set map ``T^-n``),
``map_points`` (pointwise forward orbits) and ``pullback_for_window`` (the
representable part of ``T^-n B`` used to assemble sampling windows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, DomainEscape, StageOverflow
from .intervals import IntervalSet

TRANSLATION_CAP = 10**6
BOOLE_CAP = 12
TOWER_HEIGHT_BOUND = 10**6


# ---------------------------------------------------------------------------
# integer translation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegerTranslation:
    """Shift by ``step`` on the integer lattice with counting measure."""

    step: int = 1

    def __post_init__(self):
        if int(self.step) == 0:
            raise ValueError("translation step must be nonzero")

    measure_kind = "counting"
    cap = TRANSLATION_CAP

    @property
    def system_id(self) -> str:
        return f"translation(step={self.step})"

    def measure(self, s: IntervalSet) -> float:
        return float(s.count_integers())

    def preimage(self, s: IntervalSet, n: int) -> IntervalSet:
        if abs(n) > self.cap:
            raise CapExceeded(f"|n|={abs(n)} beyond translation cap")
        return s.translate(-n * self.step)

    def pullback_for_window(self, s: IntervalSet, n: int) -> IntervalSet:
        return self.preimage(s, n)

    def map_points(self, xs: np.ndarray, n: int) -> np.ndarray:
        return np.asarray(xs, dtype=np.float64) + n * self.step

    def forward_window(self, s: IntervalSet, n: int) -> IntervalSet:
        return s.translate(n * self.step)


# ---------------------------------------------------------------------------
# Boole map
# ---------------------------------------------------------------------------

def _boole_roots(y: float) -> tuple[float, float]:
    """Both solutions of x - 1/x = y, computed without cancellation.

    The roots satisfy x_neg * x_pos = -1 and x_neg + x_pos = y, so one
    stable evaluation fixes the other exactly.
    """
    s = math.hypot(y, 2.0)
    if y >= 0.0:
        x_pos = 0.5 * (y + s)
        x_neg = -1.0 / x_pos
    else:
        x_neg = 0.5 * (y - s)
        x_pos = -1.0 / x_neg
    return x_neg, x_pos


@dataclass(frozen=True)
class BooleMap:
    """``x -> x - 1/x`` on the line, Lebesgue measure preserved."""

    cap: int = BOOLE_CAP

    measure_kind = "lebesgue"

    @property
    def system_id(self) -> str:
        return "boole"

    def measure(self, s: IntervalSet) -> float:
        return s.total_length

    def _pull_once(self, s: IntervalSet) -> IntervalSet:
        # Both branches are increasing, so each [a, b) pulls back to a
        # negative-branch and a positive-branch half-open interval.
        out = []
        for a, b in s.intervals:
            na, pa = _boole_roots(a)
            nb, pb = _boole_roots(b)
            out.append((na, nb))
            out.append((pa, pb))
        return IntervalSet(out)

    def _push_once(self, s: IntervalSet) -> IntervalSet:
        out = []
        for a, b in s.intervals:
            if a <= 0.0 <= b:
                raise DomainEscape(
                    "forward image of an interval touching 0 is unbounded")
            out.append((a - 1.0 / a, b - 1.0 / b))
        return IntervalSet(out)

    def preimage(self, s: IntervalSet, n: int) -> IntervalSet:
        """T^-n(s) for n >= 0; the forward set image for n < 0.

        The map is 2-to-1, so only n >= 0 preserves measure.
        """
        if abs(n) > self.cap:
            raise CapExceeded(
                f"|n|={abs(n)} beyond Boole cap {self.cap} "
                "(interval count doubles per pullback)")
        out = s
        for _ in range(n):
            out = self._pull_once(out)
        for _ in range(-n):
            out = self._push_once(out)
        return out

    def pullback_for_window(self, s: IntervalSet, n: int) -> IntervalSet:
        return self.preimage(s, n)

    def map_points(self, xs: np.ndarray, n: int) -> np.ndarray:
        if n < 0:
            raise DomainEscape("Boole map is 2-to-1: no pointwise inverse")
        out = np.array(xs, dtype=np.float64)
        for _ in range(n):
            if np.any(out == 0.0):
                raise DomainEscape("orbit hit the singular point 0")
            out = out - 1.0 / out
        return out

    def forward_window(self, s: IntervalSet, n: int) -> IntervalSet:
        out = s
        for _ in range(n):
            out = self._push_once(out)
        return out

    def orbit_hull(self, s: IntervalSet, horizon: int) -> IntervalSet:
        """Single interval containing every T^-k(s), 0 <= k < horizon.

        Exact unions double in size per pullback, so beyond the cap the
        experiments sample on this hull instead; counts read on subsets of
        the true union are unaffected by the extra covered mass.
        """
        lo, hi = s.hull()
        lo_k, hi_k = lo, hi
        for _ in range(max(0, horizon - 1)):
            lo_k = _boole_roots(lo_k)[0]
            hi_k = _boole_roots(hi_k)[1]
        return IntervalSet([(lo_k, hi_k)])


# ---------------------------------------------------------------------------
# rank-one cutting and stacking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RankOneSpec:
    """Parameters of a finite-stage rank-one construction.

    ``cuts[k] >= 2`` subcolumns at stage k; ``spacers[k][i] >= 0`` spacer
    levels above subcolumn i.  Heights follow
    ``h_{k+1} = cuts[k] * h_k + sum(spacers[k])`` from ``h_0 = 1``.
    """

    cuts: tuple[int, ...]
    spacers: tuple[tuple[int, ...], ...]
    base_width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "cuts", tuple(int(r) for r in self.cuts))
        object.__setattr__(
            self, "spacers", tuple(tuple(int(x) for x in row)
                                   for row in self.spacers))
        if len(self.spacers) != len(self.cuts):
            raise ValueError("need one spacer row per stage")
        for k, r in enumerate(self.cuts):
            if r < 2:
                raise ValueError(f"cuts[{k}]={r} < 2")
            if len(self.spacers[k]) != r:
                raise ValueError(
                    f"spacer row {k} has {len(self.spacers[k])} entries, "
                    f"expected {r}")
            if any(x < 0 for x in self.spacers[k]):
                raise ValueError("spacer counts must be nonnegative")
        if not self.base_width > 0:
            raise ValueError("base_width must be positive")

    @property
    def stages(self) -> int:
        return len(self.cuts)

    def heights(self) -> list[int]:
        """[h_0, ..., h_K] by the recursion."""
        hs = [1]
        for k, r in enumerate(self.cuts):
            hs.append(r * hs[-1] + sum(self.spacers[k]))
        return hs


@dataclass
class TowerState:
    """Realized stage-K column: one interval per level, equal widths.

    ``positions[j]`` is the left endpoint of level j on the line; the map
    sends level j onto level j+1 by translation for j < height-1.
    """

    positions: np.ndarray
    width: float
    stage_heights: list[int]

    # sorted view for point location
    _order: np.ndarray = field(init=False, repr=False)
    _sorted_pos: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        self._order = np.argsort(self.positions)
        self._sorted_pos = self.positions[self._order]

    @property
    def height(self) -> int:
        return len(self.positions)

    def level_interval(self, j: int) -> IntervalSet:
        p = float(self.positions[j])
        return IntervalSet([(p, p + self.width)])

    def levels_union(self, lo: int, hi: int) -> IntervalSet:
        """Union of levels lo..hi-1 as one normalized set."""
        ps = np.sort(self.positions[lo:hi])
        return IntervalSet([(float(p), float(p) + self.width) for p in ps])

    @property
    def space(self) -> IntervalSet:
        return self.levels_union(0, self.height)

    @property
    def defined_domain(self) -> IntervalSet:
        """Where one application of the map is defined: all but the top."""
        return self.levels_union(0, self.height - 1) if self.height > 1 \
            else IntervalSet.empty()

    def level_of_points(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        idx = np.searchsorted(self._sorted_pos, xs, side="right") - 1
        if np.any(idx < 0):
            raise DomainEscape("point below every level")
        inside = xs < self._sorted_pos[idx] + self.width
        if not np.all(inside):
            raise DomainEscape("point between levels of the tower")
        return self._order[idx]


def build_tower(spec: RankOneSpec,
                max_height: int = TOWER_HEIGHT_BOUND) -> TowerState:
    """Cut and stack to the final stage of ``spec``.

    Spacer levels are fresh intervals allocated left to right above the
    initial base ``[0, base_width)``.
    """
    heights = spec.heights()
    if heights[-1] > max_height:
        raise StageOverflow(
            f"final height {heights[-1]} exceeds bound {max_height}")
    positions = [0.0]
    width = spec.base_width
    high_water = spec.base_width
    for k, r in enumerate(spec.cuts):
        new_width = width / r
        new_positions = []
        for i in range(r):
            off = i * new_width
            new_positions.extend(p + off for p in positions)
            for _ in range(spec.spacers[k][i]):
                new_positions.append(high_water)
                high_water += new_width
        positions = new_positions
        width = new_width
    assert len(positions) == heights[-1]
    return TowerState(np.array(positions), width, heights)


class RankOneTower:
    """Finite-stage rank-one system over Lebesgue measure."""

    measure_kind = "lebesgue"
    cap = TRANSLATION_CAP

    def __init__(self, spec: RankOneSpec,
                 max_height: int = TOWER_HEIGHT_BOUND):
        self.spec = spec
        self.state = build_tower(spec, max_height)

    @property
    def system_id(self) -> str:
        return (f"rankone(cuts={list(self.spec.cuts)},"
                f" height={self.state.height})")

    @property
    def height(self) -> int:
        return self.state.height

    def measure(self, s: IntervalSet) -> float:
        return s.total_length

    def _check_inside(self, s: IntervalSet):
        if not self.state.space.contains_set(s):
            raise DomainEscape("set leaves the constructed tower levels")

    def _shift_levels(self, s: IntervalSet, n: int,
                      lo_level: int, hi_level: int) -> IntervalSet:
        """Move the part of s lying in levels [lo_level, hi_level) by n
        levels; the rest of s must be empty.

        Each interval of s is split against the level partition by overlap
        windows; grazing contacts below 1e-14 are float noise from the
        non-dyadic level widths and carry no mass.
        """
        st = self.state
        w = st.width
        sorted_pos = st._sorted_pos
        order = st._order
        pieces = []
        moved_length = 0.0
        for a, b in s.intervals:
            i0 = int(np.searchsorted(sorted_pos, a - w, side="left"))
            i1 = int(np.searchsorted(sorted_pos, b, side="left"))
            covered = 0.0
            for i in range(i0, i1):
                p = float(sorted_pos[i])
                lo = max(a, p)
                hi = min(b, p + w)
                if hi - lo <= 1e-14:
                    continue
                lvl = int(order[i])
                if not (lo_level <= lvl < hi_level):
                    raise DomainEscape(
                        f"level {lvl} outside movable range "
                        f"[{lo_level}, {hi_level})")
                dx = float(st.positions[lvl + n] - st.positions[lvl])
                pieces.append((lo + dx, hi + dx))
                covered += hi - lo
                moved_length += hi - lo
            if abs(covered - (b - a)) > 1e-9:
                raise DomainEscape("set has mass between tower levels")
        out = IntervalSet(pieces)
        assert abs(out.total_length - moved_length) < 1e-9
        return out

    def preimage(self, s: IntervalSet, n: int) -> IntervalSet:
        """Exact T^-n(s); requires s inside the range (n>=0) or the
        domain (n<0) of T^n, else the truncated construction cannot
        determine the answer."""
        self._check_inside(s)
        if n == 0:
            return s
        h = self.state.height
        if n > 0:
            if n >= h:
                raise DomainEscape(f"n={n} at least tower height {h}")
            return self._shift_levels(s, -n, n, h)
        m = -n
        if m >= h:
            raise DomainEscape(f"|n|={m} at least tower height {h}")
        return self._shift_levels(s, m, 0, h - m)

    def pullback_for_window(self, s: IntervalSet, n: int) -> IntervalSet:
        """The representable part of T^-n(s): points of the constructed
        tower whose n-step forward orbit is defined and lands in s."""
        self._check_inside(s)
        if n == 0:
            return s
        if n < 0:
            return self.preimage(s, n)
        h = self.state.height
        if n >= h:
            return IntervalSet.empty()
        reachable = s.intersect(self.state.levels_union(n, h))
        if reachable.is_empty:
            return reachable
        return self._shift_levels(reachable, -n, n, h)

    def domain_of_power(self, n: int) -> IntervalSet:
        """Levels where T^n is defined (n >= 0)."""
        h = self.state.height
        if n <= 0:
            return self.state.space
        if n >= h:
            return IntervalSet.empty()
        return self.state.levels_union(0, h - n)

    def map_points(self, xs: np.ndarray, n: int) -> np.ndarray:
        st = self.state
        xs = np.asarray(xs, dtype=np.float64)
        if xs.size == 0:
            return xs.copy()
        lvl = st.level_of_points(xs)
        target = lvl + n
        if np.any(target < 0) or np.any(target >= st.height):
            raise DomainEscape("orbit leaves the constructed stages")
        return xs + (st.positions[target] - st.positions[lvl])

    def forward_window(self, s: IntervalSet, n: int) -> IntervalSet:
        return self.preimage(s, -n)


# ---------------------------------------------------------------------------
# derived set statistics
# ---------------------------------------------------------------------------

def intersect_sequence(system, a: IntervalSet, n_max: int) -> np.ndarray:
    """mu(A intersect T^-n A) for n = 0..n_max, exactly.

    For towers the set A must sit inside the domain of T^n_max so every
    overlap is determined by the constructed stages.
    """
    out = np.empty(n_max + 1)
    out[0] = system.measure(a)
    for n in range(1, n_max + 1):
        if isinstance(system, RankOneTower):
            if not system.domain_of_power(n).contains_set(a):
                raise DomainEscape(
                    f"A has mass within {n} levels of the tower top")
            pulled = system.pullback_for_window(a, n)
        else:
            pulled = system.preimage(a, n)
        out[n] = system.measure(a.intersect(pulled))
    return out


def lagged_overlap(system, a: IntervalSet, b: IntervalSet, n: int) -> float:
    """mu(A intersect T^-n B), with the same tower domain rule."""
    if isinstance(system, RankOneTower) and n > 0:
        if not system.domain_of_power(n).contains_set(a):
            raise DomainEscape(
                f"A has mass within {n} levels of the tower top")
        return system.measure(a.intersect(system.pullback_for_window(b, n)))
    return system.measure(a.intersect(system.preimage(b, n)))


def symmetric_diff_measure(system, a: IntervalSet, n: int) -> float:
    """mu(A symdiff T^-n A) = 2(mu(A) - mu(A intersect T^-n A))."""
    if n == 0:
        return 0.0
    seq_val = lagged_overlap(system, a, a, n)
    return 2.0 * (system.measure(a) - seq_val)


def wandering_check(system, w: IntervalSet, n_max: int) -> bool:
    """True iff the backward orbit sets T^-n W, |n| <= n_max, are pairwise
    disjoint.  Uses T^-a W ^ T^-b W = T^-a (W ^ T^-(b-a) W)."""
    if w.is_empty:
        return True
    for k in range(1, 2 * n_max + 1):
        if system.measure(w.intersect(system.preimage(w, k))) > 0.0:
            return False
    return True


def orbit_window(system, a: IntervalSet, horizon: int) -> IntervalSet:
    """A set covering every T^-k(A), 0 <= k < horizon, for sampling.

    Exact union when pullbacks are cheap; for the Boole map beyond its cap
    a hull bound is returned (a superset keeps all counts unbiased).
    """
    if isinstance(system, BooleMap) and horizon - 1 > system.cap:
        return system.orbit_hull(a, horizon)
    out = a
    for k in range(1, horizon):
        out = out.union(system.pullback_for_window(a, k))
    return out
