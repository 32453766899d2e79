import math

import numpy as np
import pytest

from poissonlab import (BooleMap, InsufficientTrials, IntegerTranslation,
                        IntervalSet, NotWandering, RankOneSpec, RankOneTower,
                        SeededSampler, dissipative_independence_experiment,
                        ergodic_average_experiment, rigidity_experiment,
                        zero_type_experiment)

TR = IntegerTranslation(1)
BO = BooleMap()
SITE = IntervalSet([(0, 1)])


def test_zero_type_translation():
    report = zero_type_experiment(TR, SITE, 5, 20_000, SeededSampler(1))
    assert report.exact == [1, 0, 0, 0, 0, 0]
    assert report.verdict == "consistent"
    assert report.notes["decay_flag"]
    for n in range(1, 6):
        assert abs(report.empirical[n]) < 3 * report.std_errors[n]


def test_zero_type_boole_matches_exact():
    a = IntervalSet([(-1, 1)])
    report = zero_type_experiment(BO, a, 6, 20_000, SeededSampler(2))
    assert report.verdict == "consistent"
    assert not report.notes["decay_flag"]  # decay is slow on this window
    assert max(abs(z) for z in report.z_scores) <= 4.0


def test_zero_type_requires_trials():
    with pytest.raises(InsufficientTrials):
        zero_type_experiment(TR, SITE, 3, 0, SeededSampler(1))


def test_reports_are_reproducible():
    r1 = zero_type_experiment(TR, SITE, 4, 2_000, SeededSampler(51))
    r2 = zero_type_experiment(TR, SITE, 4, 2_000, SeededSampler(51))
    assert r1.empirical == r2.empirical
    assert r1.std_errors == r2.std_errors


def test_rigidity_lag_zero_always_flagged():
    report = rigidity_experiment(TR, SITE, [0, 1, 7], 0.2, 2_000,
                                 SeededSampler(3))
    assert report.notes["flagged_times"] == [0]
    assert report.verdict == "consistent"


def test_rigidity_translation_never_flagged():
    report = rigidity_experiment(TR, SITE, [1, 2, 3], 0.3, 2_000,
                                 SeededSampler(4))
    assert report.notes["flagged_times"] == []


def rigid_tower():
    cuts = (12,) * 4
    spacers = tuple(tuple([0] * 11 + [1]) for _ in cuts)
    return RankOneTower(RankOneSpec(cuts, spacers, 1.0))


def test_rigidity_tower_transfer():
    tower = rigid_tower()
    h3 = tower.state.stage_heights[3]
    base1 = IntervalSet([(0.0, 1.0 / 12.0)])
    a = base1.intersect(tower.state.levels_union(0, 11 * h3))
    report = rigidity_experiment(tower, a, [h3 // 2, h3], 0.2, 20_000,
                                 SeededSampler(5))
    assert report.notes["flagged_times"] == [h3]
    assert report.verdict == "consistent"
    mu_a = tower.measure(a)
    i = report.lags.index(h3)
    assert report.exact[i] > report.notes["rigidity_floor"]
    assert report.exact[i] == pytest.approx(10 / 11 * mu_a, rel=1e-12)


def test_ergodic_horizon_one_is_bernoulli_indicator():
    a = IntervalSet([(0, 1)])
    report = ergodic_average_experiment(BO, a, 8, 400, SeededSampler(6))
    # smallest horizon is 1: averages there are 0/1 indicators
    assert report.lags[0] == 1
    p = 1.0 - math.exp(-1.0)
    assert abs(report.empirical[0] - p) < 4 * report.std_errors[0]


def test_ergodic_mean_example():
    a = IntervalSet([(0, 1)])
    report = ergodic_average_experiment(BO, a, 64, 300, SeededSampler(7))
    target = 1.0 - math.exp(-1.0)
    assert report.exact[-1] == pytest.approx(target)
    assert abs(report.empirical[-1] - target) < 4 * report.std_errors[-1]


def test_ergodic_boole_concentrates():
    report = ergodic_average_experiment(BO, IntervalSet([(-1, 1)]), 512,
                                        200, SeededSampler(8))
    assert report.verdict == "consistent"
    assert report.notes["sd_ratio"] < 0.75


def test_ergodic_translation_halves():
    # independent hit indicators: the deviation drops like 1/sqrt(H)
    report = ergodic_average_experiment(TR, SITE, 512, 200, SeededSampler(9))
    assert report.verdict == "consistent"
    assert report.notes["sd_ratio"] < 0.5


def test_dissipative_translation():
    report = dissipative_independence_experiment(
        TR, SITE, list(range(21)), 20_000, SeededSampler(10))
    assert report.verdict == "consistent"
    assert report.notes["max_pairwise_z"] < 4.0
    assert all(p > 1e-3 for p in report.notes["gof_pvalues"])


def test_dissipative_step_two_poisson_fit():
    sys2 = IntegerTranslation(2)
    w = IntervalSet([(0, 2)])  # two sites: intensity 2 per lag
    report = dissipative_independence_experiment(
        sys2, w, list(range(11)), 20_000, SeededSampler(11))
    assert report.verdict == "consistent"
    assert report.exact[0] == 2.0
    assert all(p > 1e-3 for p in report.notes["gof_pvalues"])


def test_dissipative_vacuous_on_empty_set():
    report = dissipative_independence_experiment(
        TR, IntervalSet(), list(range(5)), 2_000, SeededSampler(12))
    assert report.verdict == "consistent"
    assert report.notes["vacuous"]


def test_dissipative_rejects_non_wandering():
    with pytest.raises(NotWandering):
        dissipative_independence_experiment(
            BO, IntervalSet([(-1, 1)]), list(range(5)), 2_000,
            SeededSampler(13))
