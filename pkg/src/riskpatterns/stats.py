"""Hypothesis tests and p-value utilities used to score patterns.

Mann-Whitney here is one-sided: it asks whether the first sample tends to
exceed the second. When both samples have at most EXACT_LIMIT observations
the p-value comes from exact enumeration of all label assignments over the
pooled values (ties score 1/2, so the enumeration is valid with ties).
Larger samples use the midrank normal approximation with tie-corrected
variance and a continuity correction of 1/2 applied to the p-value only;
the reported z deviate is uncorrected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import StatsError

# Both sample sizes at or below this bound -> exact enumeration.
EXACT_LIMIT = 8

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def normal_sf(z: float) -> float:
    """Standard normal survival function P(Z >= z)."""
    return 0.5 * math.erfc(z / _SQRT2)


def normal_log_sf(z: float) -> float:
    """log P(Z >= z), stable far into the upper tail.

    erfc underflows near z = 38; beyond z = 34 an asymptotic expansion of
    the Mills ratio is used instead (relative error < 1e-9 there).
    """
    if z < 34.0:
        sf = normal_sf(z)
        if sf > 0.0:
            return math.log(sf)
    # sf(z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - ...)
    zz = z * z
    series = 1.0 - 1.0 / zz + 3.0 / zz**2 - 15.0 / zz**3 + 105.0 / zz**4
    return -0.5 * zz - _LOG_SQRT_2PI - math.log(z) + math.log(series)


def midranks(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the average of their ranks."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=float)
    sv = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        # ranks i+1 .. j+1 averaged
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def tie_term(values: Sequence[float] | np.ndarray) -> float:
    """Sum of t^3 - t over groups of tied values (0 when all distinct)."""
    v = np.sort(np.asarray(values, dtype=float))
    total = 0.0
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[j + 1] == v[i]:
            j += 1
        t = j - i + 1
        if t > 1:
            total += t**3 - t
        i = j + 1
    return total


@dataclass(frozen=True)
class MannWhitneyResult:
    u_inside: float
    z: float
    p_one_sided: float
    n_inside: int
    n_outside: int
    degenerate: bool = False


def u_statistic(inside: np.ndarray, outside: np.ndarray) -> float:
    """U counting pairs where inside > outside, ties as 1/2."""
    pooled = np.concatenate([inside, outside])
    ranks = midranks(pooled)
    n = inside.size
    return float(ranks[:n].sum() - n * (n + 1) / 2.0)


def _exact_p(pooled: np.ndarray, n: int, u_obs: float) -> float:
    """P(U >= u_obs) by enumerating every n-subset of the pooled values."""
    size = pooled.size
    gt = (pooled[:, None] > pooled[None, :]).astype(float)
    eq = (pooled[:, None] == pooled[None, :]).astype(float)
    score = gt + 0.5 * eq
    np.fill_diagonal(score, 0.0)
    row_sums = score.sum(axis=1)
    idx = np.array(list(combinations(range(size), n)), dtype=np.intp)
    # U(S) = sum_{i in S} row_sums[i] - sum_{i,j in S} score[i, j]
    within = score[idx[:, :, None], idx[:, None, :]].sum(axis=(1, 2))
    u_all = row_sums[idx].sum(axis=1) - within
    return float(np.mean(u_all >= u_obs - 1e-9))


def mann_whitney(
    inside: Sequence[float] | np.ndarray, outside: Sequence[float] | np.ndarray
) -> MannWhitneyResult:
    """One-sided Mann-Whitney: is `inside` stochastically greater than `outside`?

    Returns u_inside, the uncorrected z deviate, and p = P(U >= u_inside)
    under the null. Exact when both sizes are <= EXACT_LIMIT, otherwise the
    tie-corrected normal approximation with continuity correction.
    """
    a = np.asarray(inside, dtype=float)
    b = np.asarray(outside, dtype=float)
    if a.size == 0 or b.size == 0:
        raise StatsError("mann_whitney requires non-empty samples")
    if np.isnan(a).any() or np.isnan(b).any():
        raise StatsError("mann_whitney samples must not contain NaN")
    n, m = a.size, b.size
    total = n + m
    pooled = np.concatenate([a, b])
    u = u_statistic(a, b)
    mu = n * m / 2.0
    ties = tie_term(pooled)
    var = (n * m / 12.0) * ((total + 1) - ties / (total * (total - 1)))
    if var <= 0.0:
        # every pooled value identical: the test carries no information
        return MannWhitneyResult(u, 0.0, 0.5, n, m, degenerate=True)
    sd = math.sqrt(var)
    z = (u - mu) / sd
    if n <= EXACT_LIMIT and m <= EXACT_LIMIT:
        p = _exact_p(pooled, n, u)
    else:
        p = normal_sf((u - 0.5 - mu) / sd)
    return MannWhitneyResult(u, z, p, n, m)


def normal_approx_p(
    inside: Sequence[float] | np.ndarray, outside: Sequence[float] | np.ndarray
) -> float:
    """The normal-approximation p-value regardless of sample size.

    Mirrors the large-sample branch of mann_whitney; exposed so the quality
    of the approximation can be measured against the exact enumeration.
    """
    a = np.asarray(inside, dtype=float)
    b = np.asarray(outside, dtype=float)
    if a.size == 0 or b.size == 0:
        raise StatsError("mann_whitney requires non-empty samples")
    n, m = a.size, b.size
    total = n + m
    u = u_statistic(a, b)
    mu = n * m / 2.0
    ties = tie_term(np.concatenate([a, b]))
    var = (n * m / 12.0) * ((total + 1) - ties / (total * (total - 1)))
    if var <= 0.0:
        return 0.5
    return normal_sf((u - 0.5 - mu) / math.sqrt(var))


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p: float


def chi_square_independence(table: Sequence[Sequence[float]] | np.ndarray) -> ChiSquareResult:
    """Pearson chi-square test of independence, no Yates correction."""
    t = np.asarray(table, dtype=float)
    if t.ndim != 2 or t.shape[0] < 2 or t.shape[1] < 2:
        raise StatsError("contingency table must be at least 2x2")
    if (t < 0).any() or np.isnan(t).any():
        raise StatsError("contingency table entries must be non-negative counts")
    rows = t.sum(axis=1)
    cols = t.sum(axis=0)
    grand = t.sum()
    if (rows == 0).any() or (cols == 0).any():
        raise StatsError("contingency table has an empty row or column margin")
    expected = np.outer(rows, cols) / grand
    stat = float(((t - expected) ** 2 / expected).sum())
    df = (t.shape[0] - 1) * (t.shape[1] - 1)
    return ChiSquareResult(stat, df, chi_square_sf(stat, df))


def chi_square_sf(x: float, df: int) -> float:
    """P(X >= x) for a chi-square variable with df degrees of freedom."""
    if df <= 0:
        raise StatsError("degrees of freedom must be positive")
    if x < 0 or math.isnan(x):
        raise StatsError("chi-square statistic must be non-negative")
    return _gammaincc(df / 2.0, x / 2.0)


def _gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x)."""
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cont_frac(a, x)


def _gamma_series(a: float, x: float) -> float:
    """Lower regularized gamma P(a, x) by series expansion (x < a+1)."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(500):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cont_frac(a: float, x: float) -> float:
    """Upper regularized gamma Q(a, x) by Lentz continued fraction (x >= a+1)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def bh_adjust(p_values: Iterable[float]) -> list[float]:
    """Benjamini-Hochberg step-up adjusted p-values, input order preserved."""
    p = np.asarray(list(p_values), dtype=float)
    if p.size == 0:
        return []
    if np.isnan(p).any() or (p < 0).any() or (p > 1).any():
        raise StatsError("p-values must lie in [0, 1]")
    n = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * n / np.arange(1, n + 1)
    adjusted = np.minimum.accumulate(scaled[::-1])[::-1]
    adjusted = np.minimum(adjusted, 1.0)
    out = np.empty(n, dtype=float)
    out[order] = adjusted
    return out.tolist()
