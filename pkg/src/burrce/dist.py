"""Burr XII distribution primitives.

The two-parameter Burr XII law has density

    f(x) = k c x^(c-1) (1 + x^c)^-(k+1),   x >= 0,  c, k > 0

and survival function S(x) = (1 + x^c)^-k. All log-domain quantities go
through :func:`log1p_pow`, which never forms ``x**c`` explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvalidParameters, MomentUndefined, SingularDensity

__all__ = [
    "BurrParams",
    "log1p_pow",
    "pdf",
    "log_pdf",
    "cdf",
    "log_survival",
    "quantile",
    "survival_inverse",
    "sample",
    "mean",
    "std_dev",
    "raw_moment",
]


@dataclass(frozen=True)
class BurrParams:
    """Shape pair ``(c, k)``; both must be finite and strictly positive."""

    c: float
    k: float

    def __post_init__(self):
        for name in ("c", "k"):
            v = getattr(self, name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise InvalidParameters(f"{name} must be a real number, got {v!r}") from None
            if not math.isfinite(v) or v <= 0.0:
                raise InvalidParameters(f"{name} must be finite and > 0, got {v!r}")
            object.__setattr__(self, name, v)

    def astuple(self) -> tuple[float, float]:
        return (self.c, self.k)


def _out(values, scalar: bool):
    return float(values) if scalar else values


def _nonnegative(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0.0)):
        raise DomainError("x must be >= 0")
    return arr, arr.ndim == 0


def log1p_pow(x, c):
    """Return ``log(1 + x**c)`` without overflow.

    Uses ``t = c*log(x)`` and ``max(t, 0) + log1p(exp(-|t|))``. ``x == 0``
    yields 0. Broadcasts over ``x`` and ``c``.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        lx = np.log(x)
    t = np.multiply(c, lx)
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


def pdf(params: BurrParams, x):
    x, scalar = _nonnegative(x)
    c, k = params.c, params.k
    at_zero = x == 0.0
    if np.any(at_zero) and c < 1.0:
        raise SingularDensity(f"density is unbounded at x=0 for c={c} < 1")
    with np.errstate(divide="ignore"):
        out = np.exp(_log_pdf_unchecked(c, k, x))
    if np.any(at_zero):
        out = np.where(at_zero, k if c == 1.0 else 0.0, out)
    return _out(out, scalar)


def _log_pdf_unchecked(c, k, x):
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.log(x)
        return np.log(k) + np.log(c) + (c - 1.0) * lx - (k + 1.0) * log1p_pow(x, c)


def log_pdf(params: BurrParams, x):
    """Log density for ``x > 0``; finite even where ``x**c`` would overflow."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError("log_pdf requires x > 0")
    return _out(_log_pdf_unchecked(params.c, params.k, arr), arr.ndim == 0)


def log_survival(params: BurrParams, x):
    x, scalar = _nonnegative(x)
    return _out(-params.k * log1p_pow(x, params.c), scalar)


def cdf(params: BurrParams, x):
    x, scalar = _nonnegative(x)
    return _out(-np.expm1(-params.k * log1p_pow(x, params.c)), scalar)


def _log_expm1(a):
    # log(exp(a) - 1) for a > 0
    a = np.asarray(a, dtype=float)
    big = a > 30.0
    safe = np.where(big, 1.0, a)
    return np.where(big, a + np.log1p(-np.exp(-np.where(big, a, 30.0))), np.log(np.expm1(safe)))


def _from_log_xc(c, log_xc):
    # x = (x^c)^(1/c), given log(1 + x^c)
    return np.exp(_log_expm1(log_xc) / c)


def quantile(params: BurrParams, u):
    """Inverse of :func:`cdf`: ``((1-u)^(-1/k) - 1)^(1/c)`` for ``0 < u < 1``."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0.0) & (u < 1.0))):
        raise DomainError("u must lie in the open interval (0, 1)")
    log_xc = -np.log1p(-u) / params.k
    return _out(_from_log_xc(params.c, log_xc), u.ndim == 0)


def survival_inverse(params: BurrParams, s):
    """Return ``x`` with ``S(x) = s``, i.e. ``(s^(-1/k) - 1)^(1/c)``.

    This is the inverse-transform map used by :func:`sample`; ``s = 1``
    maps to 0.
    """
    s = np.asarray(s, dtype=float)
    if np.any(~((s > 0.0) & (s <= 1.0))):
        raise DomainError("s must lie in (0, 1]")
    log_xc = -np.log(s) / params.k
    with np.errstate(divide="ignore"):
        out = np.where(log_xc > 0.0, _from_log_xc(params.c, np.where(log_xc > 0.0, log_xc, 1.0)), 0.0)
    return _out(out, s.ndim == 0)


def sample(params: BurrParams, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` variates by ``(u^(-1/k) - 1)^(1/c)``, ``u ~ U(0, 1)``."""
    count = int(count)
    if count < 1:
        raise DomainError("count must be >= 1")
    u = 1.0 - rng.random(count)  # (0, 1]
    return survival_inverse(params, u)


def raw_moment(params: BurrParams, order: int) -> float:
    """``E[X^r] = k B(k - r/c, 1 + r/c)``, defined for ``c k > r``."""
    c, k = params.c, params.k
    if c * k <= order:
        raise MomentUndefined(f"E[X^{order}] requires c*k > {order}, got c*k={c * k}")
    a = order / c
    return math.exp(math.log(k) + gammaln(k - a) + gammaln(1.0 + a) - gammaln(k + 1.0))


def mean(params: BurrParams) -> float:
    return raw_moment(params, 1)


def std_dev(params: BurrParams) -> float:
    if params.c * params.k <= 2:
        raise MomentUndefined(f"variance requires c*k > 2, got c*k={params.c * params.k}")
    m1 = raw_moment(params, 1)
    m2 = raw_moment(params, 2)
    return math.sqrt(m2 - m1 * m1)
