"""Poisson configuration sampling over finite-measure windows.

A configuration is one draw of the point process restricted to a declared
window.  Counts on disjoint subsets of the window are independent Poisson
variables with the subset's measure as parameter, so experiments that only
read counts inside the window see exactly the law of the full process.

Reproducibility: every draw is tied to a :class:`SeededSampler`, a
(seed, stream) pair feeding a counter-based generator.  Trial t of any
experiment uses ``sampler.offset(t)``, which makes results independent of
how trials are chunked across workers.
"""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientTrials, WindowViolation
from .intervals import IntervalSet

# Substream layout: experiments that need several independent families of
# trials space their bases this far apart.
STREAM_BLOCK = 1 << 32


@dataclass(frozen=True)
class SeededSampler:
    """Deterministic RNG handle: same (seed, stream) -> same bits."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        # counter-mode jump: each stream owns a disjoint counter range
        bitgen = np.random.Philox(key=self.seed % (1 << 128),
                                  counter=(self.stream % (1 << 64)) << 192)
        return np.random.Generator(bitgen)

    def offset(self, k: int) -> "SeededSampler":
        return SeededSampler(self.seed, self.stream + k)

    def block(self, j: int) -> "SeededSampler":
        """Base sampler for the j-th independent sub-experiment."""
        return SeededSampler(self.seed, self.stream + j * STREAM_BLOCK)


class _StreamRunner:
    """Per-trial generators by counter reset on one shared bit generator.

    Bit-identical to ``sampler.offset(t).generator()`` but avoids the
    object construction cost inside trial loops.
    """

    def __init__(self, sampler: SeededSampler):
        self._base = sampler.stream
        self._bitgen = np.random.Philox(key=sampler.seed % (1 << 128))
        self._gen = np.random.Generator(self._bitgen)
        self._state = self._bitgen.state

    def trial(self, t: int) -> np.random.Generator:
        st = self._state
        st["state"]["counter"][:] = 0
        st["state"]["counter"][3] = (self._base + t) % (1 << 64)
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return self._gen


@dataclass(frozen=True)
class Configuration:
    """Finite point multiset observed through a window."""

    points: np.ndarray
    window: IntervalSet

    def __post_init__(self):
        pts = np.sort(np.asarray(self.points, dtype=np.float64))
        object.__setattr__(self, "points", pts)
        if pts.size and not bool(np.all(self.window.contains_points(pts))):
            raise WindowViolation("a point lies outside the window")

    @property
    def size(self) -> int:
        return int(self.points.size)


def _sample_points(system, window: IntervalSet, rng: np.random.Generator,
                   scale: float = 1.0) -> np.ndarray:
    """Points of one Poisson draw with intensity scale*mu on the window."""
    if window.is_empty or scale == 0.0:
        return np.empty(0)
    if system.measure_kind == "counting":
        sites = window.sites()
        occupancy = rng.poisson(scale, size=sites.size)
        return np.repeat(sites.astype(np.float64), occupancy)
    lengths = np.array([b - a for a, b in window.intervals])
    lefts = np.array([a for a, _ in window.intervals])
    total = float(lengths.sum())
    n = int(rng.poisson(scale * total))
    if n == 0:
        return np.empty(0)
    # inverse transform over cumulative interval lengths: exact, branch-free
    t = rng.random(n) * total
    cum = np.concatenate(([0.0], np.cumsum(lengths)))
    idx = np.searchsorted(cum, t, side="right") - 1
    idx = np.clip(idx, 0, len(lengths) - 1)
    return lefts[idx] + (t - cum[idx])


def sample_poisson(system, window: IntervalSet, sampler: SeededSampler,
                   scale: float = 1.0) -> Configuration:
    """One Poisson configuration with intensity ``scale * mu`` on window."""
    rng = sampler.generator()
    return Configuration(_sample_points(system, window, rng, scale), window)


def count(config: Configuration, a: IntervalSet) -> int:
    """Number of configuration points in a (with multiplicity)."""
    if not config.window.contains_set(a):
        raise WindowViolation("count set not contained in the window")
    return a.count_points(config.points)


def pushforward(config: Configuration, system, n: int) -> Configuration:
    """Apply the point map T^n to every point and to the window."""
    if n == 0:
        return config
    return Configuration(system.map_points(config.points, n),
                         system.forward_window(config.window, n))


# ---------------------------------------------------------------------------
# trial batteries
# ---------------------------------------------------------------------------

def _count_block(system, window, edge_list, sampler, lo, hi):
    out = np.empty((hi - lo, len(edge_list)), dtype=np.int64)
    runner = _StreamRunner(sampler)
    for t in range(lo, hi):
        rng = runner.trial(t)
        pts = _sample_points(system, window, rng)
        for j, edges in enumerate(edge_list):
            if pts.size:
                inside = np.searchsorted(edges, pts, side="right") % 2
                out[t - lo, j] = int(inside.sum())
            else:
                out[t - lo, j] = 0
    return out


def _chunks(trials: int, workers: int):
    workers = max(1, min(workers, trials))
    step = -(-trials // workers)
    return [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]


def count_matrix(system, window: IntervalSet, sets, trials: int,
                 sampler: SeededSampler, workers: int = 1) -> np.ndarray:
    """trials x len(sets) matrix of counts, one fresh configuration per
    trial (stream = trial index).  Chunking across workers never changes
    the result."""
    edge_list = [s.edges for s in sets]
    if workers <= 1 or trials < 2 * workers:
        return _count_block(system, window, edge_list, sampler, 0, trials)
    spans = _chunks(trials, workers)
    args = [(system, window, edge_list, sampler, lo, hi) for lo, hi in spans]
    with mp.get_context("fork").Pool(len(spans)) as pool:
        blocks = pool.starmap(_count_block, args)
    return np.concatenate(blocks, axis=0)


def jackknife_covariance(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Unbiased sample covariance and its leave-one-out jackknife error."""
    n = len(x)
    if n < 2:
        raise InsufficientTrials("need at least two trials for covariance")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    sx, sy, sxy = x.sum(), y.sum(), (x * y).sum()
    est = (sxy - sx * sy / n) / (n - 1)
    if n == 2:
        return float(est), float(abs(est))
    # leave-one-out estimates in O(n)
    lx, ly, lxy = sx - x, sy - y, sxy - x * y
    loo = (lxy - lx * ly / (n - 1)) / (n - 2)
    mean_loo = loo.mean()
    var_jack = (n - 1) / n * np.sum((loo - mean_loo) ** 2)
    return float(est), float(np.sqrt(var_jack))


@dataclass(frozen=True)
class CovarianceEstimate:
    estimate: float
    std_error: float


def estimate_count_covariance(system, a: IntervalSet, b: IntervalSet,
                              n: int, trials: int, sampler: SeededSampler,
                              workers: int = 1) -> CovarianceEstimate:
    """Empirical covariance of (N(A), N(T^-n B)) over fresh configurations.

    The window is A united with the pullback of B, so both counts are read
    exactly.  The target identity is Cov = mu(A intersect T^-n B).
    """
    if trials < 1000:
        raise InsufficientTrials(f"{trials} trials < 1000")
    from .systems import RankOneTower
    if isinstance(system, RankOneTower) and n > 0:
        if not system.domain_of_power(n).contains_set(a):
            raise WindowViolation(
                "A must avoid the top levels so the lag-n overlap is exact")
    pulled = system.pullback_for_window(b, n)
    window = a.union(pulled)
    counts = count_matrix(system, window, [a, pulled], trials, sampler,
                          workers)
    est, se = jackknife_covariance(counts[:, 0], counts[:, 1])
    return CovarianceEstimate(est, se)
