"""Special-function numerics: regularized incomplete gamma and small stats helpers.

The incomplete gamma evaluation follows the classic two-regime scheme:
a power series for x < a + 1 and a Lentz-style continued fraction
otherwise. Absolute error is far below the 1e-8 the chi-squared tail
computation requires.
"""

from __future__ import annotations

import math

import numpy as np

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 1000


def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by series; needs x < a + 1."""
    if x <= 0.0:
        return 0.0
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_continued_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by continued fraction; x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def reg_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a)."""
    if a <= 0.0:
        raise ValueError("a must be > 0")
    if x < 0.0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _lower_series(a, x))
    return max(0.0, 1.0 - _upper_continued_fraction(a, x))


def reg_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0.0:
        raise ValueError("a must be > 0")
    if x < 0.0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _lower_series(a, x))
    return min(1.0, _upper_continued_fraction(a, x))


def chi2_upper_tail(statistic: float, df: int) -> float:
    """P(X >= statistic) for a chi-squared variable with df degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if statistic < 0.0:
        raise ValueError("statistic must be >= 0")
    return reg_gamma_q(df / 2.0, statistic / 2.0)


def nearest_rank_percentile(values, pct: float) -> float:
    """Nearest-rank percentile: the value at rank ceil(pct/100 * n), 1-indexed.

    pct = 0 maps to the minimum, pct = 100 to the maximum.
    """
    arr = np.sort(np.asarray(values, dtype=np.float64))
    if arr.size == 0:
        raise ValueError("percentile of empty sequence")
    if not 0.0 <= pct <= 100.0:
        raise ValueError(f"percentile {pct} outside [0, 100]")
    rank = max(1, math.ceil(pct / 100.0 * arr.size))
    return float(arr[rank - 1])
