"""Finite symmetric tensor towers and the exponential-of-operator functor.

A d-dimensional space stands in for the one-point function space; level k
of the tower is the symmetric subspace of its k-th tensor power, in the
multiset basis with occupation normalization sqrt(k! / prod m_i!).  The
exponential of a contraction psi acts as the compression of psi^(tensor k)
to level k, which makes functoriality, unitarity and projection
preservation exact finite-dimensional statements.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegeneratePhases, Level1NotPreserved, NormExceeded,
                     NotDecreasing, NotProjection)

OP_TOL = 1e-8
PHASE_TOL = 1e-9


def _multisets(d: int, k: int):
    return list(itertools.combinations_with_replacement(range(d), k))


@dataclass(frozen=True)
class SymFockSpace:
    """Truncated symmetric tower over a d-dimensional base, levels 0..K."""

    d: int
    chaos_cap: int
    basis: tuple = field(init=False)

    def __post_init__(self):
        if self.d < 1 or self.chaos_cap < 0:
            raise ValueError("need d >= 1 and chaos_cap >= 0")
        levels = tuple(tuple(_multisets(self.d, k))
                       for k in range(self.chaos_cap + 1))
        object.__setattr__(self, "basis", levels)

    def level_dim(self, k: int) -> int:
        return len(self.basis[k])

    def embedding(self, k: int) -> np.ndarray:
        """Isometry from level k into the full k-fold tensor power.

        Column for multiset lam has value sqrt(prod m_i! / k!) on every
        distinct arrangement of lam.
        """
        if k == 0:
            return np.ones((1, 1))
        dim_tensor = self.d ** k
        cols = []
        for lam in self.basis[k]:
            counts = np.bincount(lam, minlength=self.d)
            weight = math.sqrt(
                math.prod(math.factorial(int(c)) for c in counts)
                / math.factorial(k))
            col = np.zeros(dim_tensor)
            for arrangement in set(itertools.permutations(lam)):
                flat = 0
                for i in arrangement:
                    flat = flat * self.d + i
                col[flat] = weight
            cols.append(col)
        return np.column_stack(cols)


@dataclass
class FockOperator:
    """Block-diagonal operator on the tower, one block per level."""

    space: SymFockSpace
    blocks: list[np.ndarray]

    def __post_init__(self):
        if len(self.blocks) != self.space.chaos_cap + 1:
            raise ValueError("one block per level required")
        vac = np.asarray(self.blocks[0])
        if vac.shape != (1, 1) or abs(vac[0, 0] - 1.0) > OP_TOL:
            raise ValueError("vacuum block must be the 1x1 identity")
        base_norm = _op_norm(self.blocks[1]) if self.space.chaos_cap else 0.0
        for k, blk in enumerate(self.blocks):
            expected = self.space.level_dim(k)
            if blk.shape != (expected, expected):
                raise ValueError(f"level {k} block has shape {blk.shape}")
            if k >= 1 and _op_norm(blk) > base_norm ** k + 1e-10:
                raise ValueError(f"level {k} block norm exceeds bound")

    def compose(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, [a @ b for a, b in
                                         zip(self.blocks, other.blocks)])

    def frobenius_distance(self, other: "FockOperator") -> float:
        return math.sqrt(sum(
            float(np.linalg.norm(a - b) ** 2)
            for a, b in zip(self.blocks, other.blocks)))


def _op_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def fock_exponential(psi: np.ndarray, space: SymFockSpace) -> FockOperator:
    """Blocks of the exponential: level k is the compression of the k-th
    tensor power of psi to the symmetric subspace."""
    psi = np.asarray(psi)
    if not np.iscomplexobj(psi):
        psi = psi.astype(np.float64)
    if psi.shape != (space.d, space.d):
        raise ValueError(f"psi must be {space.d}x{space.d}")
    if _op_norm(psi) > 1.0 + 1e-10:
        raise NormExceeded(f"spectral norm {_op_norm(psi):.6f} > 1")
    blocks = [np.ones((1, 1))]
    tensor_power = np.ones((1, 1))
    for k in range(1, space.chaos_cap + 1):
        tensor_power = np.kron(tensor_power, psi)
        s = space.embedding(k)
        blocks.append(s.T @ tensor_power @ s)
    return FockOperator(space, blocks)


# ---------------------------------------------------------------------------
# projection limits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitCheckReport:
    base_gaps: list[float]
    tower_gaps: list[float]
    bounds: list[float]
    decreasing: bool
    within_bounds: bool


def exponential_limit_check(projections, space: SymFockSpace,
                            tol: float = OP_TOL) -> LimitCheckReport:
    """Exponentials of a decreasing projection chain converge to the
    exponential of the limit projection, at the rate of the base gaps.

    The limit of a finite decreasing chain is its last element; gaps are
    Frobenius distances and the bound at level cap K is
    sqrt(sum_{k<=K} k^2) times the base gap.
    """
    mats = [np.asarray(p, dtype=np.float64) for p in projections]
    if not mats:
        raise ValueError("need at least one projection")
    for p in mats:
        if p.shape != (space.d, space.d):
            raise ValueError("projection of wrong shape")
        if (np.linalg.norm(p - p.T) > tol
                or np.linalg.norm(p @ p - p) > tol):
            raise NotProjection("not an orthogonal projection")
    for p, q in zip(mats, mats[1:]):
        if np.linalg.norm(q @ p - q) > tol:
            raise NotDecreasing("ranges are not nested decreasing")
    limit = mats[-1]
    exp_limit = fock_exponential(limit, space)
    rate = math.sqrt(sum(k * k for k in range(space.chaos_cap + 1)))
    base_gaps, tower_gaps, bounds = [], [], []
    for p in mats:
        base_gap = float(np.linalg.norm(p - limit))
        tower_gap = fock_exponential(p, space).frobenius_distance(exp_limit)
        base_gaps.append(base_gap)
        tower_gaps.append(tower_gap)
        bounds.append(rate * base_gap)
    decreasing = all(b <= a + tol for a, b in zip(tower_gaps, tower_gaps[1:]))
    within = all(g <= b + tol for g, b in zip(tower_gaps, bounds))
    return LimitCheckReport(base_gaps, tower_gaps, bounds, decreasing, within)


# ---------------------------------------------------------------------------
# Markov restriction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MarkovRestriction:
    is_markov_like: bool
    restricted: np.ndarray
    is_sub_markov: bool


def markov_restriction_check(phi: FockOperator,
                             stationary_weights=None,
                             tol: float = 1e-10) -> MarkovRestriction:
    """Read the one-point block of a positivity-preserving tower operator
    and test it for the sub-Markov property under the given weights.

    Positivity here is the entrywise cone of the standard basis; the
    one-point block Q is sub-Markov when Q >= 0, row sums <= 1 and
    weighted column sums <= 1.
    """
    if phi.space.chaos_cap < 1:
        raise Level1NotPreserved("tower has no one-point level")
    restricted = np.asarray(phi.blocks[1])
    if np.iscomplexobj(restricted):
        if np.abs(restricted.imag).max() > tol:
            return MarkovRestriction(False, restricted, False)
        restricted = restricted.real
    restricted = restricted.astype(np.float64)
    d = restricted.shape[0]
    if stationary_weights is None:
        weights = np.ones(d)
    else:
        weights = np.asarray(stationary_weights, dtype=np.float64)
        if weights.shape != (d,) or weights.min() <= 0:
            raise ValueError("stationary weights must be positive, length d")
    def _entrywise_nonneg(blk):
        if np.iscomplexobj(blk):
            if np.abs(blk.imag).max() > tol:
                return False
            blk = blk.real
        return blk.min() >= -tol

    entrywise_ok = all(_entrywise_nonneg(blk) for blk in phi.blocks)
    vacuum_ok = abs(phi.blocks[0][0, 0] - 1.0) <= tol
    is_markov_like = entrywise_ok and vacuum_ok
    nonneg = restricted.min() >= -tol
    row_ok = bool(np.all(restricted.sum(axis=1) <= 1.0 + tol))
    col_ok = bool(np.all(weights @ restricted <= weights * (1.0 + tol)))
    return MarkovRestriction(is_markov_like, restricted,
                             nonneg and row_ok and col_ok)


# ---------------------------------------------------------------------------
# eigenphase distinctness
# ---------------------------------------------------------------------------

def _circle_gap(x: np.ndarray) -> np.ndarray:
    """Distance of angles to 0 mod 2pi."""
    y = np.mod(x, 2.0 * math.pi)
    return np.minimum(y, 2.0 * math.pi - y)


@dataclass(frozen=True)
class PhaseSumCheck:
    simple_per_level: bool
    cross_level_disjoint: bool
    level_collisions: list[int]
    cross_collisions: list[tuple[int, int]]


def ageev_check(eigenphases, chaos_cap: int,
                tol: float = PHASE_TOL) -> PhaseSumCheck:
    """Distinctness structure of multiset sums of eigenphases.

    For each level k <= cap, form all sums of k phases with repetition
    (mod 2pi).  ``simple_per_level`` asks the sums within each level to be
    pairwise distinct; ``cross_level_disjoint`` asks the sum sets of
    different levels to avoid each other.  Both are decided by exhaustive
    enumeration.
    """
    phases = np.asarray(list(eigenphases), dtype=np.float64)
    if phases.ndim != 1 or phases.size == 0:
        raise ValueError("need a nonempty phase list")
    if phases.size >= 2:
        diffs = phases[None, :] - phases[:, None]
        gaps = _circle_gap(diffs[np.triu_indices(phases.size, 1)])
        if gaps.size and gaps.min() <= tol:
            raise DegeneratePhases("coincident eigenphases")
    level_sums = {}
    for k in range(1, chaos_cap + 1):
        sums = [math.fsum(phases[list(c)])
                for c in itertools.combinations_with_replacement(
                    range(phases.size), k)]
        level_sums[k] = np.array(sums)
    level_collisions = []
    for k, sums in level_sums.items():
        if sums.size >= 2:
            diffs = sums[None, :] - sums[:, None]
            gaps = _circle_gap(diffs[np.triu_indices(sums.size, 1)])
            if gaps.size and gaps.min() <= tol:
                level_collisions.append(k)
    cross_collisions = []
    for k1 in level_sums:
        for k2 in level_sums:
            if k1 >= k2:
                continue
            diffs = level_sums[k1][:, None] - level_sums[k2][None, :]
            if _circle_gap(diffs).min() <= tol:
                cross_collisions.append((k1, k2))
    return PhaseSumCheck(not level_collisions, not cross_collisions,
                         level_collisions, cross_collisions)
