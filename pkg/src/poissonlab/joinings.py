"""Coupled Poisson samplers and the statistics of their joint laws.

A joining of two copies of the suspension is specified by an intensity
decomposition: an independent part on each side plus a coupled part that
pairs every sampled point x with its image T^k x, for a family of lags k
with nonnegative weights.  Superposing the three ingredients gives a joint
point process whose marginals are exactly Poisson and whose cross
covariances have the closed form

    Cov(N_X(A), N_Y(B)) = rx * ry * sum_k c_k mu(A intersect T^-k B).

Side retentions rx, ry in (0, 1] thin the visible points of a pair on one
side; by Poisson splitting this is the exact realization of a coupled part
whose two marginal intensities differ by that factor, which is what the
rescaled-coupling lift produces when the two scales differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (AmbiguousPairing, BadScales, InsufficientTrials,
                     MassInconsistency, ReconstructionFailure)
from .intervals import IntervalSet
from .sampling import (Configuration, SeededSampler, _StreamRunner, _chunks,
                       _sample_points, jackknife_covariance)
from .stats import GOF_ALPHA, poisson_gof, two_sample_table_test
from .systems import lagged_overlap

SCALE_TOL = 1e-9


@dataclass(frozen=True)
class CoupledPart:
    """Weighted family of graph couplings x -> T^k x.

    ``weights[k]`` is the intensity scale of the lag-k pairs relative to
    the base measure.  ``x_retention`` / ``y_retention`` keep each pair's
    point on that side independently with the given probability.
    """

    weights: tuple[tuple[int, float], ...] = ()
    x_retention: float = 1.0
    y_retention: float = 1.0

    def __post_init__(self):
        pairs = tuple(sorted((int(k), float(c)) for k, c in
                             (self.weights.items()
                              if isinstance(self.weights, dict)
                              else self.weights)))
        if any(c < 0 for _, c in pairs):
            raise ValueError("coupling weights must be nonnegative")
        if len({k for k, _ in pairs}) != len(pairs):
            raise ValueError("duplicate lag in coupling weights")
        object.__setattr__(self, "weights", tuple((k, c) for k, c in pairs
                                                  if c > 0))
        for r in (self.x_retention, self.y_retention):
            if not 0.0 < r <= 1.0:
                raise ValueError("retentions must lie in (0, 1]")

    @classmethod
    def null(cls) -> "CoupledPart":
        return cls(())

    @classmethod
    def single_graph(cls, lag: int, scale: float = 1.0) -> "CoupledPart":
        return cls(((lag, scale),))

    @property
    def is_null(self) -> bool:
        return not self.weights

    @property
    def total_scale(self) -> float:
        return float(sum(c for _, c in self.weights))

    def scaled(self, factor: float) -> "CoupledPart":
        return CoupledPart(tuple((k, c * factor) for k, c in self.weights),
                           self.x_retention, self.y_retention)


@dataclass(frozen=True)
class JoiningSpec:
    """Intensity decomposition (independent X, independent Y, coupled)."""

    mu_prime_scale: float
    nu_prime_scale: float
    coupled: CoupledPart = field(default_factory=CoupledPart.null)

    def validate(self):
        a, ap = self.mu_prime_scale, self.nu_prime_scale
        if not (0.0 <= a <= 1.0 and 0.0 <= ap <= 1.0):
            raise MassInconsistency("independent scales must lie in [0, 1]")
        cx = self.coupled.total_scale * self.coupled.x_retention
        cy = self.coupled.total_scale * self.coupled.y_retention
        if abs(a + cx - 1.0) > SCALE_TOL:
            raise MassInconsistency(
                f"X intensity {a} + {cx} != 1")
        if abs(ap + cy - 1.0) > SCALE_TOL:
            raise MassInconsistency(
                f"Y intensity {ap} + {cy} != 1")
        return self

    def scaled(self, factor: float) -> "JoiningSpec":
        """All intensity scales multiplied by factor (retentions kept)."""
        return JoiningSpec(self.mu_prime_scale * factor,
                           self.nu_prime_scale * factor,
                           self.coupled.scaled(factor))

    def cross_covariance_exact(self, system, a: IntervalSet,
                               b: IntervalSet) -> float:
        r = self.coupled.x_retention * self.coupled.y_retention
        return r * math.fsum(c * lagged_overlap(system, a, b, k)
                             for k, c in self.coupled.weights)


def product_spec() -> JoiningSpec:
    return JoiningSpec(1.0, 1.0, CoupledPart.null())


def diagonal_spec() -> JoiningSpec:
    return JoiningSpec(0.0, 0.0, CoupledPart.single_graph(0, 1.0))


def builtin_specs() -> dict[str, JoiningSpec]:
    """The spec families every joint-law battery runs over."""
    half = JoiningSpec(0.5, 0.5, CoupledPart.single_graph(0, 0.5))
    lag_mix = JoiningSpec(0.25, 0.25,
                          CoupledPart({-1: 0.25, 1: 0.5}))
    lifted = lift_scaled_coupling(CoupledPart.single_graph(1, 1.0), 1.0, 0.5)
    return {
        "product": product_spec(),
        "diagonal": diagonal_spec(),
        "half-diagonal": half,
        "lag-mix": lag_mix,
        "lifted-thinned": lifted,
    }


def lift_scaled_coupling(gamma: CoupledPart, c1: float,
                         c2: float) -> JoiningSpec:
    """Joining built from a coupling of the rescaled bases (c1 mu, c2 nu).

    The coupled part is scaled by 1/max(c1, c2); the smaller side keeps a
    retention c_min/c_max and gets an independent top-up of scale
    1 - c_min/c_max, so both marginals come back to intensity mu.
    """
    if c1 <= 0.0 or c2 <= 0.0:
        raise BadScales("scales must be positive")
    swapped = c1 < c2
    cmax, cmin = (c2, c1) if swapped else (c1, c2)
    if abs(gamma.total_scale - cmax) > SCALE_TOL:
        raise BadScales(
            f"coupling scale {gamma.total_scale} != major side {cmax}")
    if gamma.x_retention != 1.0 or gamma.y_retention != 1.0:
        raise BadScales("input coupling must be unthinned")
    ratio = cmin / cmax
    scaled = gamma.scaled(1.0 / cmax)
    if swapped:
        coupled = CoupledPart(scaled.weights, x_retention=ratio)
        return JoiningSpec(1.0 - ratio, 0.0, coupled).validate()
    coupled = CoupledPart(scaled.weights, y_retention=ratio)
    return JoiningSpec(0.0, 1.0 - ratio, coupled).validate()


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _pair_regions(spec: JoiningSpec, system, window_x,
                  window_y) -> dict[int, IntervalSet]:
    """Birth region per coupled lag: everything visible on either side."""
    return {k: window_x.union(system.pullback_for_window(window_y, k))
            for k, _ in spec.coupled.weights}


def _joint_points(spec: JoiningSpec, system, window_x, window_y, rng,
                  regions=None):
    """Point arrays (X, Y) of one draw of the joining on the two windows.

    Draw order is fixed (X independent, coupled lags ascending, Y
    independent) so a (seed, stream) pair reproduces the sample exactly.
    """
    if regions is None:
        regions = _pair_regions(spec, system, window_x, window_y)
    xs, ys = [], []
    if spec.mu_prime_scale > 0.0:
        xs.append(_sample_points(system, window_x, rng,
                                 spec.mu_prime_scale))
    for k, c in spec.coupled.weights:
        born = _sample_points(system, regions[k], rng, c)
        if spec.coupled.x_retention < 1.0 and born.size:
            born_x = born[rng.random(born.size) < spec.coupled.x_retention]
        else:
            born_x = born
        if born_x.size:
            xs.append(born_x[window_x.contains_points(born_x)])
        if spec.coupled.y_retention < 1.0 and born.size:
            born_y = born[rng.random(born.size) < spec.coupled.y_retention]
        else:
            born_y = born
        if born_y.size:
            mapped = system.map_points(born_y, k)
            ys.append(mapped[window_y.contains_points(mapped)])
    if spec.nu_prime_scale > 0.0:
        ys.append(_sample_points(system, window_y, rng,
                                 spec.nu_prime_scale))
    cat = lambda parts: (np.concatenate(parts) if parts else np.empty(0))
    return cat(xs), cat(ys)


def sample_joining(spec: JoiningSpec, system, window_x: IntervalSet,
                   window_y: IntervalSet,
                   sampler: SeededSampler) -> tuple[Configuration,
                                                    Configuration]:
    """One joint draw: a pair of configurations with the prescribed
    coupling.  Marginals are Poisson with the base intensity on each
    window."""
    spec.validate()
    rng = sampler.generator()
    px, py = _joint_points(spec, system, window_x, window_y, rng)
    return Configuration(px, window_x), Configuration(py, window_y)


def _joint_count_block(spec, system, window_x, window_y, edges_x, edges_y,
                       sampler, combine, parts, lo, hi):
    out = np.empty((hi - lo, 2), dtype=np.int64)
    sub = spec if parts == 1 else spec.scaled(1.0 / parts)
    regions = _pair_regions(sub, system, window_x, window_y)
    runner = _StreamRunner(sampler)
    for t in range(lo, hi):
        rng = runner.trial(t)
        nx = ny = 0
        for _ in range(parts):
            px, py = _joint_points(sub, system, window_x, window_y, rng,
                                   regions)
            cx = int((np.searchsorted(edges_x, px, side="right") % 2).sum())
            cy = int((np.searchsorted(edges_y, py, side="right") % 2).sum())
            if combine == "sum":
                nx, ny = nx + cx, ny + cy
            else:  # deliberately wrong merge for negative controls
                nx, ny = max(nx, cx), max(ny, cy)
        out[t - lo] = (nx, ny)
    return out


def joint_count_matrix(spec: JoiningSpec, system, a: IntervalSet,
                       b: IntervalSet, trials: int, sampler: SeededSampler,
                       workers: int = 1, combine: str = "sum",
                       parts: int = 1) -> np.ndarray:
    """trials x 2 matrix of (N_X(A), N_Y(B)).

    With ``parts=n`` each trial superposes n independent draws of the
    1/n-scaled spec; ``combine='max'`` replaces the superposition sum by a
    pointwise max, which is the deliberate negative control.
    """
    spec.validate()
    window_x = a.union(b)
    window_y = a.union(b)
    args = (spec, system, window_x, window_y, a.edges, b.edges, sampler,
            combine, parts)
    if workers <= 1 or trials < 2 * workers:
        return _joint_count_block(*args, 0, trials)
    import multiprocessing as mp
    spans = _chunks(trials, workers)
    with mp.get_context("fork").Pool(len(spans)) as pool:
        blocks = pool.starmap(_joint_count_block,
                              [args + span for span in spans])
    return np.concatenate(blocks, axis=0)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossCovariance:
    estimate: float
    std_error: float
    exact: float

    @property
    def z(self) -> float:
        if self.std_error > 0:
            return (self.estimate - self.exact) / self.std_error
        return 0.0 if self.estimate == self.exact else math.inf


def cross_covariance_test(spec: JoiningSpec, system, a: IntervalSet,
                          b: IntervalSet, trials: int,
                          sampler: SeededSampler,
                          workers: int = 1) -> CrossCovariance:
    """Empirical Cov(N_X(A), N_Y(B)) against the closed weighted-overlap
    form."""
    if trials < 1000:
        raise InsufficientTrials(f"{trials} trials < 1000")
    counts = joint_count_matrix(spec, system, a, b, trials, sampler, workers)
    est, se = jackknife_covariance(counts[:, 0], counts[:, 1])
    return CrossCovariance(est, se, spec.cross_covariance_exact(system, a, b))


@dataclass(frozen=True)
class MarginalReport:
    lam: float
    p_x: float
    p_y: float

    @property
    def passed(self) -> bool:
        return self.p_x > GOF_ALPHA and self.p_y > GOF_ALPHA


def marginal_test(spec: JoiningSpec, system, a: IntervalSet, trials: int,
                  sampler: SeededSampler, workers: int = 1) -> MarginalReport:
    """Both marginal counts on A must fit Poisson(mu(A))."""
    if trials < 10_000:
        raise InsufficientTrials(f"{trials} trials < 10000")
    counts = joint_count_matrix(spec, system, a, a, trials, sampler, workers)
    lam = system.measure(a)
    return MarginalReport(lam, poisson_gof(counts[:, 0], lam),
                          poisson_gof(counts[:, 1], lam))


@dataclass(frozen=True)
class SuperpositionReport:
    parts: int
    p_value: float

    @property
    def passed(self) -> bool:
        return self.p_value > GOF_ALPHA


def id_superposition_test(spec: JoiningSpec, system, a: IntervalSet,
                          parts: int, trials: int, sampler: SeededSampler,
                          workers: int = 1,
                          combine: str = "sum") -> SuperpositionReport:
    """The joint count law must equal the n-fold superposition of the
    1/n-scaled spec.  ``combine='max'`` runs the negative control, which a
    correct sampler must fail."""
    if not 2 <= parts <= 8:
        raise ValueError("parts must lie in 2..8")
    if trials < 1000:
        raise InsufficientTrials(f"{trials} trials < 1000")
    one = joint_count_matrix(spec, system, a, a, trials, sampler, workers)
    many = joint_count_matrix(spec, system, a, a, trials,
                              sampler.block(1), workers,
                              combine=combine, parts=parts)
    labels_one = one[:, 0] * 10_000 + one[:, 1]
    labels_many = many[:, 0] * 10_000 + many[:, 1]
    p = two_sample_table_test(labels_one, labels_many)
    return SuperpositionReport(parts, p)


def sample_graph_pair(system, lag: int, window_x: IntervalSet,
                      sampler: SeededSampler,
                      scale: float = 1.0) -> tuple[Configuration,
                                                   Configuration]:
    """Pure lag-graph draw with every pair visible on both sides.

    The Y window is the exact forward image of the X window, so the two
    marginals have equal size and the pairing is total; this is the input
    the reconstruction routine is specified against.
    """
    rng = sampler.generator()
    xs = _sample_points(system, window_x, rng, scale)
    ys = system.map_points(xs, lag)
    window_y = system.forward_window(window_x, lag)
    return Configuration(xs, window_x), Configuration(ys, window_y)


# ---------------------------------------------------------------------------
# reconstruction from marginals
# ---------------------------------------------------------------------------

def reconstruct_from_marginals(config_x: Configuration,
                               config_y: Configuration, system, lag: int,
                               tol: float = 1e-9) -> list[tuple[float, float]]:
    """Rebuild the pairing of a pure lag-k graph sample from its two
    projections.

    Every x must match exactly one y with |y - T^k x| <= tol; several
    candidates (atoms, duplicated points) raise AmbiguousPairing, unmatched
    points raise ReconstructionFailure.
    """
    xs = config_x.points
    ys = config_y.points
    if xs.size != ys.size:
        raise ReconstructionFailure(
            f"marginal sizes differ: {xs.size} != {ys.size}")
    if xs.size == 0:
        return []
    targets = system.map_points(xs, lag)
    used = np.zeros(ys.size, dtype=bool)
    pairs = []
    for x, t in zip(xs, targets):
        lo = int(np.searchsorted(ys, t - tol, side="left"))
        hi = int(np.searchsorted(ys, t + tol, side="right"))
        if hi - lo > 1:
            raise AmbiguousPairing(
                f"{hi - lo} candidate partners within {tol:g} of T^k x")
        if hi - lo == 0 or used[lo]:
            raise ReconstructionFailure("no unused partner for a point")
        used[lo] = True
        pairs.append((float(x), float(ys[lo])))
    return pairs
