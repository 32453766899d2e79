"""Mixing experiments: exact base-set overlaps versus suspension statistics.

Each experiment compares an exactly computed base-side sequence (set
algebra from :mod:`poissonlab.systems`) with Monte Carlo statistics of the
induced configuration dynamics, and issues a verdict:

* ``consistent``   -- every comparison within |z| <= 4,
* ``inconsistent`` -- some |z| > 4,
* ``inconclusive`` -- a non-z criterion (e.g. concentration of Birkhoff
  averages) was not met.

The suspension-side covariance target at lag n is always the base overlap
mu(A intersect T^-n A); the agreement of the two columns in every report
is the one-point-level identity connecting base and suspension spectra.

Known limitation, recorded in reports: rigidity scans over a finite
candidate grid can flag rigid times but cannot certify rigidity-freeness,
and no finite-sample certificate for the K/mild-mixing distinctions or for
higher-order mixing is attempted (no quantitative target exists for
triple correlations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientTrials, NotWandering
from .intervals import IntervalSet
from .sampling import SeededSampler, count_matrix, jackknife_covariance
from .stats import GOF_ALPHA, Z_INCONSISTENT, pairwise_correlation_z, \
    poisson_gof, z_score
from .systems import intersect_sequence, orbit_window, symmetric_diff_measure, \
    wandering_check


# Cross-trial deviation of Birkhoff averages must shrink by at least this
# factor over an 8x horizon span to certify concentration.
CONCENTRATION_RATIO = 0.75


@dataclass
class MixingReport:
    """Aligned exact and empirical sequences over one lag grid."""

    system_id: str
    kind: str
    lags: list[int]
    exact: list[float]
    empirical: list[float]
    std_errors: list[float]
    z_scores: list[float]
    verdict: str
    notes: dict = field(default_factory=dict)

    def rows(self):
        for i, lag in enumerate(self.lags):
            yield (lag, self.empirical[i], self.std_errors[i],
                   self.exact[i], self.z_scores[i])


def _verdict_from_z(zs, extra_ok: bool = True) -> str:
    if any(abs(z) > Z_INCONSISTENT for z in zs):
        return "inconsistent"
    return "consistent" if extra_ok else "inconclusive"


def _lagged_counts(system, a: IntervalSet, lags, trials, sampler, workers):
    """Counts of N(T^-n A) for each lag over fresh configurations."""
    pulled = [system.pullback_for_window(a, n) for n in lags]
    window = IntervalSet([iv for s in pulled for iv in s.intervals] +
                         list(a.intervals))
    return count_matrix(system, window, pulled, trials, sampler, workers)


def zero_type_experiment(system, a: IntervalSet, n_max: int, trials: int,
                         sampler: SeededSampler,
                         workers: int = 1) -> MixingReport:
    """Decay of mu(A ^ T^-n A) against suspension count covariances."""
    if trials < 1:
        raise InsufficientTrials("zero-type experiment needs trials >= 1")
    exact = intersect_sequence(system, a, n_max)
    lags = list(range(n_max + 1))
    counts = _lagged_counts(system, a, lags, trials, sampler, workers)
    est, se, zs = [], [], []
    for i, n in enumerate(lags):
        e, s = jackknife_covariance(counts[:, 0], counts[:, i])
        est.append(e)
        se.append(s)
        zs.append(z_score(e, exact[n], s))
    mu_a = system.measure(a)
    decayed = exact[n_max] < 0.05 * mu_a
    report = MixingReport(system.system_id, "zero_type", lags,
                          list(exact), est, se, zs, _verdict_from_z(zs))
    report.notes["decay_flag"] = bool(decayed)
    report.notes["higher_order"] = "not tested (no quantitative target)"
    return report


def rigidity_experiment(system, a: IntervalSet, candidate_times, epsilon,
                        trials: int, sampler: SeededSampler,
                        workers: int = 1) -> MixingReport:
    """Scan candidate return times for near-invariance of A.

    A time n is flagged rigid when mu(A symdiff T^-n A) < epsilon * 2mu(A);
    at flagged times the suspension covariance must match the overlap,
    which then exceeds (1 - epsilon) * mu(A).
    """
    if trials < 1:
        raise InsufficientTrials("rigidity experiment needs trials >= 1")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    lags = [int(n) for n in candidate_times]
    mu_a = system.measure(a)
    exact, flagged = [], []
    for n in lags:
        sd = symmetric_diff_measure(system, a, n)
        overlap_n = mu_a - 0.5 * sd
        exact.append(overlap_n)
        flagged.append(sd < epsilon * 2.0 * mu_a)
    counts = _lagged_counts(system, a, [0] + lags, trials, sampler, workers)
    est, se, zs = [], [], []
    for i, n in enumerate(lags):
        e, s = jackknife_covariance(counts[:, 0], counts[:, i + 1])
        est.append(e)
        se.append(s)
        # only flagged times carry a sharp target worth a verdict
        zs.append(z_score(e, exact[i], s) if flagged[i] else 0.0)
    report = MixingReport(system.system_id, "rigidity", lags, exact,
                          est, se, zs, _verdict_from_z(zs))
    report.notes["flagged_times"] = [n for n, f in zip(lags, flagged) if f]
    report.notes["epsilon"] = epsilon
    report.notes["rigidity_floor"] = (1.0 - epsilon) * mu_a
    return report


def _birkhoff_block(system, window, a_edges, horizons, sampler, lo, hi):
    from .sampling import _StreamRunner, _sample_points
    h_max = max(horizons)
    out = np.empty((hi - lo, len(horizons)))
    runner = _StreamRunner(sampler)
    for t in range(lo, hi):
        rng = runner.trial(t)
        pts = _sample_points(system, window, rng)
        hits = np.empty(h_max)
        xs = pts.copy()
        for k in range(h_max):
            if xs.size:
                inside = np.searchsorted(a_edges, xs, side="right") % 2
                hits[k] = 1.0 if inside.any() else 0.0
                xs = system.map_points(xs, 1)
            else:
                hits[k] = 0.0
        csum = np.cumsum(hits)
        out[t - lo] = [csum[h - 1] / h for h in horizons]
    return out


def ergodic_average_experiment(system, a: IntervalSet, horizon: int,
                               trials: int, sampler: SeededSampler,
                               workers: int = 1) -> MixingReport:
    """Concentration of Birkhoff averages of the hit indicator of A.

    Per trial and horizon H the average (1/H) sum_{k<H} 1{N(A) o T_*^k >= 1}
    is recorded; the marginal expectation is 1 - exp(-mu(A)) by
    stationarity, and the cross-trial deviation must shrink with H.
    """
    if trials < 2:
        raise InsufficientTrials("need at least two trials")
    if horizon < 8:
        raise ValueError("horizon too short to observe concentration")
    horizons = [max(1, horizon // 8), max(2, horizon // 4),
                max(4, horizon // 2), horizon]
    window = orbit_window(system, a, horizon)
    target = 1.0 - math.exp(-system.measure(a))
    import multiprocessing as mp
    from .sampling import _chunks
    args_fn = lambda lo, hi: (system, window, a.edges, horizons, sampler,
                              lo, hi)
    if workers <= 1 or trials < 2 * workers:
        averages = _birkhoff_block(*args_fn(0, trials))
    else:
        spans = _chunks(trials, workers)
        with mp.get_context("fork").Pool(len(spans)) as pool:
            blocks = pool.starmap(_birkhoff_block,
                                  [args_fn(lo, hi) for lo, hi in spans])
        averages = np.concatenate(blocks, axis=0)
    means = averages.mean(axis=0)
    sds = averages.std(axis=0, ddof=1)
    ses = sds / math.sqrt(trials)
    zs = [z_score(m, target, s) for m, s in zip(means, ses)]
    # Decay certificate over the 8x horizon span.  Independent hit
    # indicators give a ratio of 8^-1/2 ~ 0.35; bases whose overlap
    # sequence decays like n^-1/2 (the Boole map) give 8^-1/4 ~ 0.59.
    # 0.75 separates both from no concentration at desk-scale noise.
    concentrated = sds[-1] < CONCENTRATION_RATIO * sds[0] \
        if sds[0] > 0 else False
    report = MixingReport(system.system_id, "ergodic_average", horizons,
                          [target] * len(horizons), list(means), list(ses),
                          zs, _verdict_from_z(zs, extra_ok=concentrated))
    report.notes["sd_by_horizon"] = list(sds)
    report.notes["sd_ratio"] = float(sds[-1] / sds[0]) if sds[0] > 0 else None
    return report


def dissipative_independence_experiment(system, w: IntervalSet, lags,
                                        trials: int, sampler: SeededSampler,
                                        workers: int = 1) -> MixingReport:
    """Counts along translates of a wandering set: independent Poisson.

    Checks all pairwise correlations against zero and every coordinate
    against Poisson(mu(W)).
    """
    if trials < 2:
        raise InsufficientTrials("need at least two trials")
    lags = [int(n) for n in lags]
    if w.is_empty:
        report = MixingReport(system.system_id, "dissipative_independence",
                              lags, [0.0] * len(lags), [0.0] * len(lags),
                              [0.0] * len(lags), [0.0] * len(lags),
                              "consistent")
        report.notes["vacuous"] = True
        return report
    if not wandering_check(system, w, max(abs(n) for n in lags) if lags
                           else 0):
        raise NotWandering("W has intersecting translates on the lag range")
    counts = _lagged_counts(system, w, lags, trials, sampler, workers)
    mu_w = system.measure(w)
    pair_z = pairwise_correlation_z(counts)
    gof = [poisson_gof(counts[:, j], mu_w) for j in range(len(lags))]
    means = counts.mean(axis=0)
    ses = counts.std(axis=0, ddof=1) / math.sqrt(trials)
    zs = [z_score(m, mu_w, s) for m, s in zip(means, ses)]
    all_z = list(zs) + list(pair_z)
    gof_ok = all(p > GOF_ALPHA for p in gof)
    report = MixingReport(system.system_id, "dissipative_independence",
                          lags, [mu_w] * len(lags), list(means), list(ses),
                          zs, _verdict_from_z(all_z, extra_ok=gof_ok))
    report.notes["max_pairwise_z"] = float(np.max(np.abs(pair_z))) \
        if len(pair_z) else 0.0
    report.notes["gof_pvalues"] = gof
    return report
