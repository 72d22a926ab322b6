"""Nonparametric model comparison: Wilcoxon signed-rank test, Pearson r, Q-Q points.

The Wilcoxon statistic is W = min(W+, W-), the smaller of the positive and
negative signed-rank sums after zero differences are discarded and tied
absolute differences receive average ranks. For small samples the two-sided
p-value is exact: p = P(min(W+, W-) <= W_observed) over all 2^n equally
likely sign assignments, evaluated by a subset-sum count over doubled ranks
(identical to full enumeration, in exact integer arithmetic). Larger samples
use the normal approximation with tie-corrected variance and a continuity
correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError

# Largest n for the exact sign-assignment distribution; beyond this the
# normal approximation takes over.
EXACT_LIMIT = 25


@dataclass(frozen=True)
class PairedSample:
    """Two measurement series of the same experiments, paired elementwise."""

    a: np.ndarray
    b: np.ndarray
    unit: str = ""

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if a.ndim != 1 or a.shape != b.shape or len(a) < 1:
            raise ValueError("paired sample needs equal-length 1-D arrays, n >= 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n_effective: int
    method: str  # "exact" | "normal-approximation"
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")

    @property
    def reject(self) -> bool:
        return self.p_value < self.alpha


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing the average of their rank positions."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_min_sum_p(ranks2: np.ndarray, w2_obs: int) -> float:
    """P(min(W+, W-) <= w_obs) over all sign assignments, on doubled ranks.

    ``ranks2`` holds 2 * rank (integers, since average ranks are multiples of
    one half); ``w2_obs`` is 2 * min(W+, W-). Subset counts stay below 2^25
    so float64 holds them exactly.
    """
    total = int(ranks2.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in ranks2:
        r = int(r)
        counts[r:] = counts[r:] + counts[: total + 1 - r]
    sums = np.arange(total + 1)
    favorable = counts[np.minimum(sums, total - sums) <= w2_obs].sum()
    return float(favorable / 2.0 ** len(ranks2))


def _normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def wilcoxon_signed_rank(s: PairedSample, alpha: float = 0.1) -> TestResult:
    """Two-sided Wilcoxon signed-rank test on the paired differences a - b.

    Zero differences are discarded (all-zero input is degenerate). With
    n_effective <= 25 the p-value is the exact tail probability
    P(min(W+, W-) <= W); otherwise a tie-corrected normal approximation with
    continuity correction is used. H0 is rejected when p < alpha.
    """
    d = s.a - s.b
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        raise DegenerateError("all paired differences are zero; no test possible")
    ranks = average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if n <= EXACT_LIMIT:
        ranks2 = np.rint(2.0 * ranks).astype(np.int64)
        w2 = int(round(2.0 * w))
        p = _exact_min_sum_p(ranks2, w2)
        method = "exact"
    else:
        mean_w = n * (n + 1) / 4.0
        var_w = n * (n + 1) * (2 * n + 1) / 24.0
        _, tie_counts = np.unique(ranks, return_counts=True)
        var_w -= float((tie_counts**3 - tie_counts).sum()) / 48.0
        if var_w <= 0:
            raise DegenerateError("zero variance in signed ranks")
        z = (w - mean_w + 0.5) / math.sqrt(var_w)
        p = min(1.0, 2.0 * _normal_cdf(z))
        method = "normal-approximation"

    return TestResult(
        statistic=w, p_value=p, n_effective=n, method=method, alpha=alpha
    )


def pearson_correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Product-moment correlation of two equal-length, non-constant vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape or len(x) < 2:
        raise ValueError("pearson needs equal-length 1-D arrays with n >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateError("pearson correlation of a constant vector")
    return float((dx @ dy) / (sx * sy))


def normal_quantile(p: float, tol: float = 1e-12) -> float:
    """Standard normal inverse CDF by bisection on the erf-based CDF."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile probability must be in (0, 1), got {p}")
    lo, hi = -10.0, 10.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def qq_points(sample: np.ndarray) -> np.ndarray:
    """Normal Q-Q plot coordinates for a sample.

    Returns an (n, 2) array pairing the standard-normal quantile at
    probability (i - 0.5) / n with the i-th order statistic standardized by
    the sample mean and population standard deviation.
    """
    arr = np.sort(np.asarray(sample, dtype=np.float64))
    n = len(arr)
    if arr.ndim != 1 or n < 2:
        raise ValueError("qq_points needs a 1-D sample with n >= 2")
    std = float(arr.std())
    if std == 0.0:
        raise DegenerateError("constant sample has no quantile spread")
    standardized = (arr - arr.mean()) / std
    theoretical = np.array([normal_quantile((i + 0.5) / n) for i in range(n)])
    return np.column_stack([theoretical, standardized])
