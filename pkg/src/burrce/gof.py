"""One-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ce import CeConfig, fit_mle
from .dist import BurrParams, cdf
from .errors import DomainError, EmptySample, SampleTooSmall
from .likelihood import Observations
from .result import FitResult

__all__ = ["KsResult", "ks_statistic", "ks_pvalue", "ks_test", "fit_and_test", "MIN_FIT_SIZE"]

MIN_FIT_SIZE = 5


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n: int
    note: str = ""


def ks_statistic(sample, cdf_fn: Callable) -> float:
    """Two-sided D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)."""
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise EmptySample("K-S statistic needs at least one value")
    f = np.asarray(cdf_fn(x), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = (i / n - f).max()
    d_minus = (f - (i - 1) / n).max()
    return float(min(1.0, max(d_plus, d_minus, 0.0)))


def ks_pvalue(d: float, n: int) -> float:
    """Asymptotic Kolmogorov tail ``Q(lambda) = 2 sum_j (-1)^(j-1) exp(-2 j^2 lambda^2)``.

    Uses ``lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D``.
    """
    if not 0.0 <= d <= 1.0:
        raise DomainError("D must lie in [0, 1]")
    if n < 1:
        raise DomainError("n must be >= 1")
    rn = math.sqrt(n)
    lam = (rn + 0.12 + 0.11 / rn) * d
    # the series converges slowly for small lambda, where Q is 1 to double precision
    if lam < 0.2:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, 1000):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return float(min(1.0, max(0.0, 2.0 * total)))


def ks_test(sample, cdf_fn: Callable) -> KsResult:
    x = np.asarray(sample, dtype=float).ravel()
    d = ks_statistic(x, cdf_fn)
    return KsResult(d, ks_pvalue(d, x.size), int(x.size))


def fit_and_test(sample, cfg: CeConfig | None = None, rng: np.random.Generator | None = None) -> tuple[FitResult, KsResult]:
    """Fit Burr XII to a complete sample by CE, then K-S test against the fit.

    The p-value ignores that the parameters were estimated from the same
    data, so it is biased upward; the returned ``KsResult.note`` says so.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < MIN_FIT_SIZE:
        raise SampleTooSmall(f"fit_and_test needs at least {MIN_FIT_SIZE} values, got {x.size}")
    obs = Observations.complete(x)
    fit = fit_mle(obs, cfg, rng)
    params = BurrParams(fit.c, fit.k)
    d = ks_statistic(x, lambda v: cdf(params, v))
    return fit, KsResult(d, ks_pvalue(d, x.size), int(x.size), note="post-fit, approximate")
