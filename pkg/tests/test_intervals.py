import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poissonlab import IntervalSet
from poissonlab.intervals import random_interval_set


def test_length_examples():
    assert IntervalSet([(0, 1)]).total_length == 1.0
    assert IntervalSet().total_length == 0.0
    assert IntervalSet([(0, 1), (2, 3.5)]).total_length == 2.5


def test_integer_count():
    assert IntervalSet([(0, 1)]).count_integers() == 1
    assert IntervalSet([(0, 3.5)]).count_integers() == 4
    assert IntervalSet([(-1.5, -0.5)]).count_integers() == 1
    assert IntervalSet([(0.25, 0.75)]).count_integers() == 0
    assert list(IntervalSet([(0, 2), (5, 6)]).sites()) == [0, 1, 5]


def test_reversed_interval_rejected():
    with pytest.raises(ValueError):
        IntervalSet([(1.0, 0.0)])
    with pytest.raises(ValueError):
        IntervalSet([(2.0, 2.0)])


def test_parser_roundtrip_and_overlap_rejection():
    s = IntervalSet.from_string("[0,1) [2,3.5)")
    assert s.intervals == ((0.0, 1.0), (2.0, 3.5))
    assert IntervalSet.from_string(s.to_string()) == s
    with pytest.raises(ValueError):
        IntervalSet.from_string("[0,2) [1,3)")
    with pytest.raises(ValueError):
        IntervalSet.from_string("[1,0)")
    with pytest.raises(ValueError):
        IntervalSet.from_string("0,1")
    assert IntervalSet.from_string("").is_empty


def test_touching_intervals_merge():
    s = IntervalSet([(0, 1), (1, 2)])
    assert s.intervals == ((0.0, 2.0),)


def test_half_open_membership():
    s = IntervalSet([(0, 1), (2, 3)])
    xs = np.array([-0.1, 0.0, 0.999, 1.0, 2.0, 3.0])
    assert s.contains_points(xs).tolist() == [False, True, True, False,
                                              True, False]
    assert s.count_points(xs) == 3


def test_hand_algebra():
    a = IntervalSet([(0, 2)])
    b = IntervalSet([(1, 3)])
    assert a.intersect(b).intervals == ((1.0, 2.0),)
    assert a.union(b).intervals == ((0.0, 3.0),)
    assert a.difference(b).intervals == ((0.0, 1.0),)
    assert a.symmetric_difference(b).intervals == ((0.0, 1.0), (2.0, 3.0))
    assert a.intersect(IntervalSet()).is_empty


def test_translate():
    assert IntervalSet([(0, 1)]).translate(-3).intervals == ((-3.0, -2.0),)


finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@st.composite
def interval_sets(draw):
    n = draw(st.integers(0, 4))
    points = sorted(draw(st.lists(finite, min_size=2 * n, max_size=2 * n,
                                  unique=True)))
    return IntervalSet([(points[2 * i], points[2 * i + 1])
                        for i in range(n)
                        if points[2 * i + 1] - points[2 * i] > 1e-6])


@settings(max_examples=150, deadline=None)
@given(interval_sets(), interval_sets())
def test_inclusion_exclusion(a, b):
    lhs = a.union(b).total_length + a.intersect(b).total_length
    assert lhs == pytest.approx(a.total_length + b.total_length, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(interval_sets(), interval_sets())
def test_symmetric_difference_measure(a, b):
    expect = (a.total_length + b.total_length
              - 2 * a.intersect(b).total_length)
    assert a.symmetric_difference(b).total_length == pytest.approx(
        expect, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(interval_sets(), interval_sets())
def test_boolean_ops_agree_with_pointwise(a, b):
    rng = np.random.default_rng(0)
    xs = rng.uniform(-55, 55, size=200)
    in_a, in_b = a.contains_points(xs), b.contains_points(xs)
    assert np.array_equal(a.intersect(b).contains_points(xs), in_a & in_b)
    assert np.array_equal(a.union(b).contains_points(xs), in_a | in_b)
    assert np.array_equal(a.difference(b).contains_points(xs),
                          in_a & ~in_b)


@settings(max_examples=100, deadline=None)
@given(interval_sets())
def test_normalization_idempotent(a):
    assert IntervalSet(a.intervals) == a


def test_random_interval_set_valid():
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = random_interval_set(rng)
        assert not s.is_empty
        for (l1, r1), (l2, r2) in zip(s.intervals, s.intervals[1:]):
            assert r1 < l2 and r1 > l1
