import math

import numpy as np
import pytest

from poissonlab import (BooleMap, CapExceeded, DomainEscape, IntegerTranslation,
                        IntervalSet, RankOneSpec, RankOneTower, StageOverflow,
                        build_tower, intersect_sequence, lagged_overlap,
                        orbit_window, symmetric_diff_measure, wandering_check)
from poissonlab.intervals import random_interval_set

SITE = IntervalSet([(0, 1)])


# ---------------------------------------------------------------------------
# integer translation
# ---------------------------------------------------------------------------

def test_translation_preimage():
    tr = IntegerTranslation(1)
    assert tr.preimage(SITE, 3).intervals == ((-3.0, -2.0),)
    assert tr.preimage(SITE, -2).intervals == ((2.0, 3.0),)
    with pytest.raises(CapExceeded):
        tr.preimage(SITE, 10**6 + 1)


def test_translation_intersect_sequence():
    tr = IntegerTranslation(1)
    assert intersect_sequence(tr, SITE, 3).tolist() == [1, 0, 0, 0]
    two = IntervalSet([(0, 2)])
    assert intersect_sequence(tr, two, 3).tolist() == [2, 1, 0, 0]


def test_translation_symmetric_diff():
    tr = IntegerTranslation(1)
    assert symmetric_diff_measure(tr, SITE, 0) == 0.0
    assert symmetric_diff_measure(tr, SITE, 1) == 2.0


# ---------------------------------------------------------------------------
# Boole map
# ---------------------------------------------------------------------------

def test_boole_preimage_forward_containment():
    # pull [0,1) back one step, push a fine grid of the result forward:
    # everything must land back inside [0,1)
    bo = BooleMap()
    target = IntervalSet([(0, 1)])
    pre = bo.preimage(target, 1)
    assert len(pre.intervals) == 2
    phi = (1 + math.sqrt(5)) / 2
    assert pre.intervals[1][0] == pytest.approx(1.0)
    assert pre.intervals[1][1] == pytest.approx(phi)
    xs = []
    for a, b in pre.intervals:
        xs.append(np.linspace(a, b, 5000, endpoint=False))
    images = bo.map_points(np.concatenate(xs), 1)
    assert np.all(target.contains_points(images))


def test_boole_measure_preservation_battery():
    bo = BooleMap()
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = random_interval_set(rng)
        for n in (1, 2, 3):
            pre = bo.preimage(a, n)
            assert pre.total_length == pytest.approx(a.total_length,
                                                     abs=1e-12)


def test_boole_cap():
    bo = BooleMap()
    with pytest.raises(CapExceeded):
        bo.preimage(SITE, 13)


def test_boole_forward_of_zero_interval_escapes():
    bo = BooleMap()
    with pytest.raises(DomainEscape):
        bo.forward_window(IntervalSet([(-1, 1)]), 1)
    # away from zero the image is fine and piecewise monotone
    img = bo.forward_window(IntervalSet([(1, 2)]), 1)
    assert img.intervals == ((0.0, 1.5),)


def test_boole_intersect_sequence_positive_decaying():
    bo = BooleMap()
    a = IntervalSet([(-1, 1)])
    seq = intersect_sequence(bo, a, 8)
    assert seq[0] == pytest.approx(2.0)
    assert np.all(seq[1:] > 0)
    assert np.all(np.diff(seq) < 0)


def test_boole_intersect_sequence_monte_carlo_oracle():
    # independent oracle: forward-iterate uniform points of A and count
    # how many remain in A after n steps
    bo = BooleMap()
    a = IntervalSet([(-1, 1)])
    seq = intersect_sequence(bo, a, 5)
    rng = np.random.default_rng(2024)
    n_samples = 10**6
    xs = rng.uniform(-1.0, 1.0, size=n_samples)
    for n in range(1, 6):
        xs = xs - 1.0 / xs
        p = np.count_nonzero(a.contains_points(xs)) / n_samples
        mc = 2.0 * p
        se = 2.0 * math.sqrt(p * (1 - p) / n_samples)
        assert abs(mc - seq[n]) < 3 * se


# ---------------------------------------------------------------------------
# flow property and wandering
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("system", [IntegerTranslation(2), BooleMap()])
def test_flow_property(system):
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = random_interval_set(rng)
        lhs = system.preimage(system.preimage(a, 2), 1)
        rhs = system.preimage(a, 3)
        assert lhs.approx_equal(rhs, tol=1e-12)


def test_wandering():
    tr = IntegerTranslation(1)
    assert wandering_check(tr, SITE, 100)
    assert wandering_check(tr, IntervalSet(), 10)
    bo = BooleMap()
    assert not wandering_check(bo, IntervalSet([(-1, 1)]), 5)


def test_wandering_monotone():
    tr = IntegerTranslation(3)
    w = IntervalSet([(0, 3)])  # sites 0,1,2: translates by 3 are disjoint
    for n in (1, 5, 20):
        assert wandering_check(tr, w, n)


# ---------------------------------------------------------------------------
# rank-one towers
# ---------------------------------------------------------------------------

def test_tower_base_case():
    spec = RankOneSpec((), (), 1.0)
    st = build_tower(spec)
    assert st.height == 1
    assert st.defined_domain.is_empty


def test_tower_no_spacers_conserves_measure():
    st = build_tower(RankOneSpec((2,), ((0, 0),), 1.0))
    assert st.height == 2
    assert st.width == 0.5
    assert st.space.total_length == pytest.approx(1.0)


def test_tower_height_recursion_example():
    st = build_tower(RankOneSpec((2,), ((0, 3),), 1.0))
    assert st.height == 2 * 1 + 3 == 5


def test_tower_heights_match_independent_recursion():
    rng = np.random.default_rng(9)
    for _ in range(20):
        stages = int(rng.integers(1, 4))
        cuts = tuple(int(rng.integers(2, 5)) for _ in range(stages))
        spacers = tuple(tuple(int(rng.integers(0, 3)) for _ in range(r))
                        for r in cuts)
        spec = RankOneSpec(cuts, spacers, 1.0)
        # independent scalar recursion
        h = 1
        for k in range(stages):
            h = cuts[k] * h + sum(spacers[k])
        assert build_tower(spec).height == h


def test_tower_climb_one_level():
    sys1 = RankOneTower(RankOneSpec((2,), ((0, 1),), 1.0))
    lvl0 = sys1.state.level_interval(0)
    lvl1 = sys1.state.level_interval(1)
    assert sys1.preimage(lvl1, 1).approx_equal(lvl0)
    assert sys1.preimage(lvl0, -1).approx_equal(lvl1)
    # nothing maps into the base: the truncated stages cannot answer
    with pytest.raises(DomainEscape):
        sys1.preimage(lvl0, 1)
    # the top level cannot move forward
    top = sys1.state.level_interval(sys1.height - 1)
    with pytest.raises(DomainEscape):
        sys1.preimage(top, -1)


def test_tower_measure_preservation():
    sys1 = RankOneTower(RankOneSpec((3, 2), ((0, 1, 0), (2, 0)), 1.0))
    rng = np.random.default_rng(4)
    h = sys1.height
    for _ in range(50):
        lo = int(rng.integers(1, h - 1))
        hi = int(rng.integers(lo + 1, h))
        a = sys1.state.levels_union(lo, hi)
        pre = sys1.preimage(a, 1)
        assert pre.total_length == pytest.approx(a.total_length, abs=1e-12)


def test_tower_point_orbits_match_sets():
    sys1 = RankOneTower(RankOneSpec((3,), ((0, 0, 1),), 1.0))
    a = sys1.state.level_interval(2)
    pre = sys1.preimage(a, 1)
    mid = np.array([(l + r) / 2 for l, r in pre.intervals])
    assert np.all(a.contains_points(sys1.map_points(mid, 1)))


def test_stage_overflow():
    with pytest.raises(StageOverflow):
        build_tower(RankOneSpec((101, 100, 100),
                                (tuple([0] * 101),
                                 tuple([0] * 100), tuple([0] * 100)), 1.0))


def rigid_tower():
    cuts = (12,) * 4
    spacers = tuple(tuple([0] * 11 + [1]) for _ in cuts)
    return RankOneTower(RankOneSpec(cuts, spacers, 1.0))


def test_rigid_tower_return_time_overlap():
    """Near-invariance of the trimmed first-stage base at the stage-3
    height, with value fixed by the copy structure: the return shifts one
    copy over inside eleven aligned copies, so exactly 1/11 escapes."""
    tower = rigid_tower()
    h3 = tower.state.stage_heights[3]
    w1 = tower.spec.base_width / tower.spec.cuts[0]
    base1 = IntervalSet([(0.0, w1)])
    a = base1.intersect(tower.state.levels_union(0, 11 * h3))
    mu_a = tower.measure(a)
    assert mu_a == pytest.approx(1584 / 20736, rel=1e-12)
    overlap = lagged_overlap(tower, a, a, h3)
    assert overlap == pytest.approx(10 / 11 * mu_a, rel=1e-12)
    sd = symmetric_diff_measure(tower, a, h3)
    assert sd == pytest.approx(2 / 11 * mu_a, rel=1e-12)
    assert sd < 0.2 * mu_a
    # point-orbit cross check on a few level pieces
    mids = np.array([(l + r) / 2 for l, r in a.intervals[:20]])
    images = tower.map_points(mids, h3)
    frac = np.mean(a.contains_points(images))
    assert 0.8 < frac <= 1.0


def test_orbit_window_covers_pullbacks():
    tr = IntegerTranslation(1)
    w = orbit_window(tr, SITE, 5)
    for k in range(5):
        assert w.contains_set(tr.preimage(SITE, k))
    bo = BooleMap()
    a = IntervalSet([(-1, 1)])
    w = orbit_window(bo, a, 40)  # beyond the cap: hull bound
    assert len(w.intervals) == 1
    for k in range(6):
        assert w.contains_set(bo.preimage(a, k))
