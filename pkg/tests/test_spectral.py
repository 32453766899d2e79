import math

import numpy as np
import pytest

from poissonlab import (BooleMap, CircleMeasure, GridMismatch,
                        IntegerTranslation, IntervalSet,
                        TailToleranceUnreachable, convolve, exp_spectral_type,
                        factorial_tail, overlap, sequence_to_measure,
                        spectral_sequence)

E_MINUS_1 = math.e - 1.0


def partial_exp(order):
    return math.fsum(1.0 / math.factorial(k) for k in range(1, order + 1))


def test_convolve_uniform_idempotent():
    u = CircleMeasure.uniform(256, mass=2.0)
    c = convolve(u, u)
    assert c.total_mass == pytest.approx(4.0, abs=1e-10)
    assert np.allclose(c.weights, 4.0 / 256, atol=1e-12)


def test_convolve_identity_spike():
    b = CircleMeasure(np.random.default_rng(0).random(128))
    delta = CircleMeasure.from_atoms([(0.0, 1.0)], 128)
    c = convolve(delta, b)
    assert np.allclose(c.weights, b.weights, atol=1e-12)


def test_convolve_group_law():
    # on-lattice angles so snapping commutes with addition
    m = 512
    h = 2 * math.pi / m
    t1, t2 = 57 * h, -16 * h
    c = convolve(CircleMeasure.from_atoms([(t1, 1.0)], m),
                 CircleMeasure.from_atoms([(t2, 1.0)], m))
    assert int(np.argmax(c.weights)) == CircleMeasure.bin_of(t1 + t2, m)
    # wrap around the circle
    t3 = 200 * h  # about 2.45 rad, doubles past pi
    c2 = convolve(CircleMeasure.from_atoms([(t3, 1.0)], m),
                  CircleMeasure.from_atoms([(t3, 1.0)], m))
    assert 2 * t3 > math.pi
    assert int(np.argmax(c2.weights)) == CircleMeasure.bin_of(
        2 * t3 - 2 * math.pi, m)


def test_convolve_grid_mismatch():
    with pytest.raises(GridMismatch):
        convolve(CircleMeasure.uniform(64), CircleMeasure.uniform(128))


def test_convolve_commutative_associative():
    rng = np.random.default_rng(12)
    for _ in range(10):
        a = CircleMeasure(rng.random(256))
        b = CircleMeasure(rng.random(256))
        c = CircleMeasure(rng.random(256))
        ab = convolve(a, b)
        ba = convolve(b, a)
        assert np.allclose(ab.weights, ba.weights, atol=1e-10)
        assert np.allclose(convolve(ab, c).weights,
                           convolve(a, convolve(b, c)).weights, atol=1e-10)


def test_symmetry_closure():
    rng = np.random.default_rng(13)
    half = rng.random(129)
    w = np.zeros(256)
    w[:129] = half
    w[129:] = half[1:128][::-1]  # mirror: w[j] == w[256 - j]
    sym = CircleMeasure(np.roll(w, 0))
    assert sym.is_symmetric()
    conv = convolve(sym, sym)
    assert conv.is_symmetric(tol=1e-10)
    e = exp_spectral_type(sym.normalized(), 8)
    assert e.measure.is_symmetric(tol=1e-10)


def test_exp_uniform_fixed_point():
    for order in (1, 3, 17):
        r = exp_spectral_type(CircleMeasure.uniform(512), order)
        expect = partial_exp(order)
        assert np.allclose(r.measure.weights, expect / 512, atol=1e-12)
        assert r.measure.total_mass == pytest.approx(expect, abs=1e-10)
    full = exp_spectral_type(CircleMeasure.uniform(512), None)
    assert full.measure.total_mass == pytest.approx(E_MINUS_1, abs=1e-10)


def test_exp_spike_at_zero():
    r = exp_spectral_type(CircleMeasure.from_atoms([(0.0, 1.0)], 128), 12)
    j0 = CircleMeasure.bin_of(0.0, 128)
    assert r.measure.weights[j0] == pytest.approx(partial_exp(12), abs=1e-10)
    assert r.measure.total_mass == pytest.approx(partial_exp(12), abs=1e-10)


def test_exp_two_spike_binomial_oracle():
    # independent expansion: the k-th power of (d_t + d_-t)/2 puts
    # C(k, j)/2^k at angle (2j - k) t; accumulate k <= 6 by scalars
    m = 4096
    step = 2.0 * math.pi / m
    theta = 256 * step  # exactly on the grid: no leakage
    sigma = CircleMeasure.from_atoms([(theta, 0.5), (-theta, 0.5)], m)
    order = 6
    r = exp_spectral_type(sigma, order)
    expect = np.zeros(m)
    for k in range(1, order + 1):
        for j in range(k + 1):
            weight = math.comb(k, j) / 2**k / math.factorial(k)
            expect[CircleMeasure.bin_of((2 * j - k) * theta, m)] += weight
    assert np.allclose(r.measure.weights, expect, atol=1e-10)


def test_exp_requires_probability_input():
    with pytest.raises(ValueError):
        exp_spectral_type(CircleMeasure.uniform(64, mass=2.0), 5)


def test_exp_tail_controls():
    assert factorial_tail(17) < 1e-15  # order 17 is ample for 1e-12
    r = exp_spectral_type(CircleMeasure.uniform(64), None, tail_tol=1e-12)
    assert r.order <= 17 and r.tail_bound < 1e-12
    r17 = exp_spectral_type(CircleMeasure.uniform(64), 17)
    assert r17.tail_bound < 1e-12
    with pytest.raises(TailToleranceUnreachable):
        exp_spectral_type(CircleMeasure.uniform(64), None, tail_tol=1e-120)
    with pytest.raises(TailToleranceUnreachable):
        exp_spectral_type(CircleMeasure.uniform(64), 65)


def test_excise_zero_atom():
    m = 128
    mix = CircleMeasure.from_atoms([(0.0, 0.5), (1.0, 0.5)], m)
    r = exp_spectral_type(mix, 6, excise_zero_atom=True)
    # with the zero atom removed this is the single-spike exponential
    pure = exp_spectral_type(CircleMeasure.from_atoms([(1.0, 1.0)], m), 6)
    assert np.allclose(r.measure.weights, pure.measure.weights, atol=1e-12)


def test_overlap_basics():
    u = CircleMeasure.uniform(128)
    assert overlap(u, u) == pytest.approx(1.0)
    s1 = CircleMeasure.from_atoms([(0.0, 1.0)], 128)
    s2 = CircleMeasure.from_atoms([(1.0, 1.0)], 128)
    assert overlap(s1, s2) == 0.0
    with pytest.raises(ValueError):
        overlap(CircleMeasure.uniform(128, mass=2.0), u)


def test_overlap_spike_vs_exponential_tail():
    m = 4096
    sigma = CircleMeasure.from_atoms([(1.0, 1.0)], m)
    r = exp_spectral_type(sigma, 17)
    tail = CircleMeasure(r.measure.weights - sigma.weights).normalized()
    assert overlap(sigma, tail) <= 2.0 / m


def test_overlap_grid_refinement_stable():
    def smooth(m, kind):
        thetas = -math.pi + np.arange(m) * (2 * math.pi / m)
        if kind == 0:
            w = 2.0 + np.cos(thetas)
        else:
            w = 2.0 + np.cos(2 * thetas + 0.5)
        return CircleMeasure(w / w.sum())

    for m in (256, 512):
        o1 = overlap(smooth(m, 0), smooth(m, 1))
        o2 = overlap(smooth(2 * m, 0), smooth(2 * m, 1))
        biggest_bin = max(smooth(m, 0).weights.max(),
                          smooth(m, 1).weights.max())
        assert abs(o2 - o1) < 5 * biggest_bin


def test_spectral_sequence_translation_is_flat_spectrum():
    seq = spectral_sequence(IntegerTranslation(1), IntervalSet([(0, 1)]), 6)
    assert seq.tolist() == [1, 0, 0, 0, 0, 0, 0]
    mu = sequence_to_measure(seq, 256)
    assert np.allclose(mu.weights, mu.total_mass / 256, atol=1e-12)


def test_spectral_sequence_boole_positive_definite():
    from scipy.linalg import toeplitz
    seq = spectral_sequence(BooleMap(), IntervalSet([(-1, 1)]), 8)
    eigs = np.linalg.eigvalsh(toeplitz(seq))
    assert eigs.min() >= -1e-8


def test_constant_sequence_gives_zero_frequency_atom():
    mu = sequence_to_measure(np.full(9, 0.7), 256)
    assert int(np.argmax(mu.weights)) == CircleMeasure.bin_of(0.0, 256)
    assert mu.total_mass == pytest.approx(0.7, rel=1e-6)
