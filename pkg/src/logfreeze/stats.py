"""Estimation utilities shared by the experiments.

Empirical distributions, Kolmogorov-Smirnov distances against analytic
CDFs, unbiased sample cumulants (k-statistics), weighted slope fits,
bootstrap errors, a variance-normalization rescale and log-binned
power-law tail fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class EmpiricalDistribution:
    sorted_samples: np.ndarray
    n: int

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDistribution":
        arr = np.sort(np.asarray(samples, dtype=float))
        return cls(arr, len(arr))


def _as_empirical(samples) -> EmpiricalDistribution:
    if isinstance(samples, EmpiricalDistribution):
        return samples
    return EmpiricalDistribution.from_samples(samples)


def ks_distance(emp, cdf) -> float:
    """sup-norm distance between the empirical CDF and a monotone CDF.

    The lower one-sided statistic uses the reference just left of each
    sample so that step CDFs with jumps at sample points compare cleanly.
    """
    emp = _as_empirical(emp)
    if emp.n < 10:
        raise EstimationError("need at least 10 samples for a KS distance")
    x = emp.sorted_samples
    f_hi = np.asarray(cdf(x), dtype=float)
    if np.any(np.diff(f_hi) < -1e-12):
        raise EstimationError("reference CDF is not monotone on the sample")
    eps = 1e-9 * np.maximum(np.abs(x), 1.0)
    f_lo = np.asarray(cdf(x - eps), dtype=float)
    i = np.arange(1, emp.n + 1)
    upper = np.max(i / emp.n - f_hi)
    lower = np.max(f_lo - (i - 1) / emp.n)
    return float(max(upper, lower, 0.0))


def sample_cumulants(samples, order: int = 4) -> np.ndarray:
    """Unbiased k-statistics of orders 1..order (order <= 4)."""
    emp = _as_empirical(samples)
    if emp.n < 30:
        raise EstimationError("need at least 30 samples for stable cumulants")
    if not 1 <= order <= 4:
        raise EstimationError("cumulant order must be between 1 and 4")
    x = emp.sorted_samples
    n = float(emp.n)
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d**2)
    m3 = np.mean(d**3)
    m4 = np.mean(d**4)
    out = [mean]
    if order >= 2:
        out.append(n / (n - 1) * m2)
    if order >= 3:
        out.append(n * n / ((n - 1) * (n - 2)) * m3)
    if order >= 4:
        out.append(
            n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2) / ((n - 1) * (n - 2) * (n - 3))
        )
    return np.array(out)


def fit_slope(xs, ys, weights=None) -> tuple[float, float, float]:
    """Weighted least-squares line fit; returns (slope, intercept, slope SE)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 3 or len(xs) != len(ys):
        raise EstimationError("need at least 3 matched points")
    w = np.ones_like(xs) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w < 0) or np.all(w == 0):
        raise EstimationError("weights must be nonnegative and not all zero")
    sw = w.sum()
    xb = (w * xs).sum() / sw
    yb = (w * ys).sum() / sw
    sxx = (w * (xs - xb) ** 2).sum()
    if sxx <= 0:
        raise EstimationError("degenerate design: all abscissae equal")
    slope = (w * (xs - xb) * (ys - yb)).sum() / sxx
    intercept = yb - slope * xb
    resid = ys - intercept - slope * xs
    dof = max(len(xs) - 2, 1)
    sigma2 = (w * resid**2).sum() / dof * (len(xs) / sw)
    stderr = math.sqrt(max(sigma2, 0.0) / sxx)
    return float(slope), float(intercept), float(stderr)


def bootstrap_se(samples, statistic, n_resamples: int = 500, seed: int = 0) -> float:
    """Bootstrap standard error of a statistic, deterministic under seed."""
    emp = _as_empirical(samples)
    if emp.n < 30:
        raise EstimationError("need at least 30 samples to bootstrap")
    if n_resamples < 200:
        raise EstimationError("need at least 200 resamples")
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0xB007], dtype=np.uint64)))
    x = emp.sorted_samples
    vals = np.empty(n_resamples)
    for i in range(n_resamples):
        vals[i] = statistic(x[rng.integers(0, emp.n, emp.n)])
    return float(np.std(vals, ddof=1))


def normalize_variance(samples, target_variance: float) -> tuple[np.ndarray, float]:
    """Rescale samples about their mean so the variance hits the target.

    Returns (rescaled samples, scale factor applied to deviations).
    """
    x = np.asarray(samples, dtype=float)
    v = x.var(ddof=1)
    if v <= 0:
        raise EstimationError("cannot normalize a degenerate sample")
    scale = math.sqrt(target_variance / v)
    return x.mean() + (x - x.mean()) * scale, scale


def tail_exponent(samples, lo: float, hi: float, min_count: int = 20):
    """Power-law exponent of a sample tail on [lo, hi].

    Logarithmic bins are merged until each holds at least min_count
    points, then the log-density slope is fit by least squares; the
    returned exponent alpha refers to density ~ s^{-alpha}.
    """
    x = np.asarray(samples, dtype=float)
    x = x[(x >= lo) & (x <= hi)]
    if len(x) < 3 * min_count:
        raise EstimationError("too few tail samples for a slope fit")
    edges = np.geomspace(lo, hi, 25)
    counts, edges = np.histogram(x, bins=edges)
    # merge right-to-left until every kept bin is populated
    merged_counts, merged_edges = [], [edges[0]]
    acc = 0
    for c, e in zip(counts, edges[1:]):
        acc += int(c)
        if acc >= min_count:
            merged_counts.append(acc)
            merged_edges.append(e)
            acc = 0
    if acc > 0 and merged_counts:
        merged_counts[-1] += acc
        merged_edges[-1] = edges[-1]
    if len(merged_counts) < 3:
        raise EstimationError("tail too sparse after merging")
    cnt = np.array(merged_counts, dtype=float)
    e = np.array(merged_edges)
    widths = np.diff(e)
    centers = np.sqrt(e[:-1] * e[1:])
    dens = cnt / (widths * len(x))
    slope, _, stderr = fit_slope(np.log(centers), np.log(dens), weights=cnt)
    return -slope, stderr


def gumbel_fit(samples) -> tuple[float, float]:
    """Moment fit of a Gumbel law: scale from the variance, location from
    the mean."""
    x = np.asarray(samples, dtype=float)
    scale = math.sqrt(6.0 * x.var(ddof=1)) / math.pi
    loc = x.mean() - np.euler_gamma * scale
    return float(loc), float(scale)


def gumbel_cdf(r, loc: float = 0.0, scale: float = 1.0):
    r = np.asarray(r, dtype=float)
    out = np.exp(-np.exp(-(r - loc) / scale))
    return float(out) if out.ndim == 0 else out


GUMBEL_SKEWNESS = 12.0 * math.sqrt(6.0) * 1.2020569031595943 / math.pi**3
