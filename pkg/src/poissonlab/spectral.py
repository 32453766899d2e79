"""Symmetric grid measures on the circle and their exponential calculus.

Measures live on a uniform grid over [-pi, pi); bin j carries the mass of
the arc starting at ``-pi + j * 2*pi/M``.  Convolution is the cyclic
group law computed by FFT, so absolute continuity and singularity become
grid-resolution statements: two measures are "disjoint at resolution M"
when no bin carries mass of both, with leakage bound 2/M for off-lattice
atoms.

The exponential of a probability measure sigma is
``sum_{k=1..K} sigma^{*k} / k!``, the truncation order driven by the
factorial tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import GridMismatch, TailToleranceUnreachable
from .intervals import IntervalSet

MASS_TOL = 1e-10
SYMMETRY_TOL = 1e-10
MAX_EXP_ORDER = 64
DEFAULT_GRID = 4096


class CircleMeasure:
    """Nonnegative weights on the uniform M-point grid over [-pi, pi)."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64).copy()
        if w.ndim != 1 or w.size < 2 or w.size % 2:
            raise ValueError("need a 1-d even-length weight array")
        if w.min() < -MASS_TOL:
            raise ValueError(f"negative bin weight {w.min():g}")
        np.clip(w, 0.0, None, out=w)
        self.weights = w

    # -- constructors -------------------------------------------------------

    @classmethod
    def uniform(cls, grid: int = DEFAULT_GRID, mass: float = 1.0):
        return cls(np.full(grid, mass / grid))

    @classmethod
    def from_atoms(cls, atoms, grid: int = DEFAULT_GRID):
        """Point masses [(theta, mass), ...] snapped to nearest bins."""
        w = np.zeros(grid)
        for theta, mass in atoms:
            w[cls.bin_of(theta, grid)] += mass
        return cls(w)

    @staticmethod
    def bin_of(theta: float, grid: int) -> int:
        h = 2.0 * math.pi / grid
        return int(round((theta + math.pi) / h)) % grid

    # -- queries -------------------------------------------------------------

    @property
    def grid(self) -> int:
        return self.weights.size

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def bin_centers(self) -> np.ndarray:
        m = self.grid
        return -math.pi + np.arange(m) * (2.0 * math.pi / m)

    def is_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        w = self.weights
        mirrored = np.roll(w[::-1], 1)  # bin j -> bin (M - j) mod M
        return bool(np.max(np.abs(w - mirrored)) <= tol)

    def normalized(self) -> "CircleMeasure":
        mass = self.total_mass
        if mass <= 0.0:
            raise ValueError("cannot normalize the zero measure")
        return CircleMeasure(self.weights / mass)

    def without_zero_atom(self) -> "CircleMeasure":
        w = self.weights.copy()
        w[self.grid // 2] = 0.0  # theta = 0 sits at bin M/2
        return CircleMeasure(w)

    def __repr__(self):
        return f"CircleMeasure(grid={self.grid}, mass={self.total_mass:.6g})"


def convolve(a: CircleMeasure, b: CircleMeasure) -> CircleMeasure:
    """Cyclic convolution; total mass multiplies, symmetry is preserved."""
    if a.grid != b.grid:
        raise GridMismatch(f"grids {a.grid} != {b.grid}")
    m = a.grid
    raw = np.fft.irfft(np.fft.rfft(a.weights) * np.fft.rfft(b.weights), m)
    # index shift: bin j represents angle -pi + j*h, so the angle sum
    # lands at index i + j + M/2 (mod M)
    return CircleMeasure(np.maximum(np.roll(raw, m // 2), 0.0))


def factorial_tail(order: int) -> float:
    """e - sum_{k<=order} 1/k! = sum_{k>order} 1/k!."""
    return float(sum(1.0 / math.factorial(k)
                     for k in range(order + 1, order + 60)))


def _pick_order(tail_tol: float) -> int:
    for k in range(1, MAX_EXP_ORDER + 1):
        if factorial_tail(k) < tail_tol:
            return k
    raise TailToleranceUnreachable(
        f"tail {tail_tol:g} needs order beyond {MAX_EXP_ORDER}")


@dataclass(frozen=True)
class ExpSpectralType:
    """Truncated exponential of a probability measure, with tail bound."""

    measure: CircleMeasure
    order: int
    tail_bound: float


def exp_spectral_type(sigma: CircleMeasure, order: int | None = None,
                      tail_tol: float = 1e-12,
                      excise_zero_atom: bool = False) -> ExpSpectralType:
    """sum_{k=1..K} sigma^{*k} / k! for a probability measure sigma.

    When ``order`` is omitted the smallest K with factorial tail below
    ``tail_tol`` is used.  ``excise_zero_atom`` removes any atom at angle 0
    from sigma first (and renormalizes), for callers that want the strictly
    reduced part.
    """
    if abs(sigma.total_mass - 1.0) > MASS_TOL:
        raise ValueError("sigma must be normalized to total mass 1")
    if excise_zero_atom:
        sigma = sigma.without_zero_atom().normalized()
    if order is None:
        order = _pick_order(tail_tol)
    if order > MAX_EXP_ORDER:
        raise TailToleranceUnreachable(
            f"order {order} beyond cap {MAX_EXP_ORDER}")
    if order < 1:
        raise ValueError("order must be at least 1")
    power = sigma
    acc = sigma.weights / 1.0
    fact = 1.0
    for k in range(2, order + 1):
        power = convolve(power, sigma)
        fact *= k
        acc = acc + power.weights / fact
    return ExpSpectralType(CircleMeasure(acc), order, factorial_tail(order))


def overlap(a: CircleMeasure, b: CircleMeasure) -> float:
    """sum_j min(a_j, b_j) for normalized measures; 0 means disjoint
    supports at grid resolution, 1 means identical."""
    if a.grid != b.grid:
        raise GridMismatch(f"grids {a.grid} != {b.grid}")
    if abs(a.total_mass - 1.0) > MASS_TOL or abs(b.total_mass - 1.0) > MASS_TOL:
        raise ValueError("overlap expects normalized measures")
    return float(np.minimum(a.weights, b.weights).sum())


def spectral_sequence(system, a: IntervalSet, n_max: int) -> np.ndarray:
    """The correlation sequence mu(A intersect T^-n A), n = 0..n_max.

    This is the positive-definite sequence whose transform is the spectral
    measure of the indicator of A; positive-definiteness of the Toeplitz
    matrix is verified before returning.
    """
    from .systems import intersect_sequence
    seq = intersect_sequence(system, a, n_max)
    eigs = np.linalg.eigvalsh(toeplitz(seq))
    if eigs.min() < -1e-8:
        raise ValueError(
            f"sequence not positive definite (min eig {eigs.min():g})")
    return seq


def sequence_to_measure(seq: np.ndarray,
                        grid: int = DEFAULT_GRID) -> CircleMeasure:
    """Grid measure with the given correlation sequence, via the Fejer
    kernel (nonnegative for positive-definite input)."""
    seq = np.asarray(seq, dtype=np.float64)
    n = seq.size - 1
    thetas = -math.pi + np.arange(grid) * (2.0 * math.pi / grid)
    density = seq[0] * np.ones(grid)
    for k in range(1, n + 1):
        density += 2.0 * (1.0 - k / (n + 1.0)) * seq[k] * np.cos(k * thetas)
    density = np.maximum(density, 0.0)
    total = density.sum()
    if total <= 0.0:
        return CircleMeasure(np.zeros(grid))
    return CircleMeasure(density * (seq[0] / total))
