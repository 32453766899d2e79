"""Small statistical helpers for the Monte Carlo verdicts.

Fixed conventions used across reports: a comparison is flagged
inconsistent when |z| > 4, goodness-of-fit passes when p > 0.001.  Both
thresholds are deliberately loose because every experiment runs many tests
over lag grids.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as sstats

Z_INCONSISTENT = 4.0
GOF_ALPHA = 1e-3


def z_score(estimate: float, target: float, std_error: float) -> float:
    if std_error > 0.0:
        return (estimate - target) / std_error
    return 0.0 if estimate == target else math.inf


def poisson_gof(counts: np.ndarray, lam: float,
                min_expected: float = 5.0) -> float:
    """Chi-square p-value for counts ~ Poisson(lam).

    Bins 0,1,2,... are merged from the right until every expected cell
    count is at least ``min_expected``.
    """
    counts = np.asarray(counts)
    n = counts.size
    if lam == 0.0:
        return 1.0 if not np.any(counts) else 0.0
    kmax = int(counts.max())
    observed = np.bincount(counts.astype(np.int64), minlength=kmax + 2)
    probs = sstats.poisson.pmf(np.arange(kmax + 1), lam)
    probs = np.append(probs, max(0.0, 1.0 - probs.sum()))
    expected = n * probs
    # merge small cells from the right into the tail
    while len(expected) > 2 and expected[-1] < min_expected:
        expected[-2] += expected[-1]
        observed[-2] += observed[-1]
        expected = expected[:-1]
        observed = observed[:-1]
    # and from the left (small lambda leaves tiny high cells only)
    while len(expected) > 2 and expected[0] < min_expected:
        expected[1] += expected[0]
        observed[1] += observed[0]
        expected = expected[1:]
        observed = observed[1:]
    if len(expected) < 2:
        return 1.0
    stat = float(np.sum((observed - expected) ** 2 / expected))
    dof = len(expected) - 1
    return float(sstats.chi2.sf(stat, dof))


def two_sample_table_test(labels_a: np.ndarray, labels_b: np.ndarray,
                          min_expected: float = 5.0) -> float:
    """Chi-square homogeneity p-value for two samples of discrete labels."""
    keys = sorted(set(labels_a.tolist()) | set(labels_b.tolist()))
    index = {k: i for i, k in enumerate(keys)}
    table = np.zeros((2, len(keys)))
    for row, labels in enumerate((labels_a, labels_b)):
        for k in labels.tolist():
            table[row, index[k]] += 1
    # merge rare columns (pooled expectation below threshold) into one
    totals = table.sum(axis=0)
    n = table.sum()
    keep = totals >= 2 * min_expected
    if (~keep).any():
        rare = table[:, ~keep].sum(axis=1, keepdims=True)
        table = np.concatenate([table[:, keep], rare], axis=1)
    if table.shape[1] < 2:
        return 1.0
    _, p, _, _ = sstats.chi2_contingency(table)
    return float(p)


def pairwise_correlation_z(matrix: np.ndarray) -> np.ndarray:
    """z-scores of all pairwise correlations of columns against 0.

    Under independence the sample correlation of n trials has standard
    error ~ 1/sqrt(n), so z = r * sqrt(n).
    """
    m = np.asarray(matrix, dtype=np.float64)
    n, k = m.shape
    sd = m.std(axis=0, ddof=1)
    sd[sd == 0.0] = np.inf
    centered = (m - m.mean(axis=0)) / sd
    corr = centered.T @ centered / (n - 1)
    iu = np.triu_indices(k, 1)
    return corr[iu] * math.sqrt(n)
