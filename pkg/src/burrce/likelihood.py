"""Burr XII log-likelihood for complete and multiply right-censored data.

An exact observation contributes ``log f(x)``; a right-censored one
contributes ``log S(x) = -k log(1 + x^c)``. The functions prefixed with
``grid_`` evaluate many ``(c, k)`` candidates against one dataset at once,
which is what the optimizers use.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .dist import BurrParams, log1p_pow
from .errors import DomainError, NoExactObservations

__all__ = [
    "Observations",
    "loglik",
    "grid_loglik",
    "score",
    "profile_k",
]


@dataclass(frozen=True, eq=False)
class Observations:
    """Positive lifetimes with an exact/censored flag per item.

    ``exact[i]`` is True for an observed failure and False for a
    right-censored unit.
    """

    values: np.ndarray
    exact: np.ndarray
    # log(values), reused by every likelihood evaluation
    _log_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        exact = np.array(self.exact, dtype=bool).ravel()
        if values.size < 1:
            raise DomainError("no observations")
        if exact.shape != values.shape:
            raise DomainError("values and exact flags differ in length")
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise DomainError("every observation must be finite and > 0")
        values.setflags(write=False)
        exact.setflags(write=False)
        lv = np.log(values)
        lv.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "_log_values", lv)

    @classmethod
    def complete(cls, values) -> "Observations":
        values = np.asarray(values, dtype=float)
        return cls(values, np.ones(values.shape, dtype=bool))

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def r(self) -> int:
        return int(np.count_nonzero(self.exact))

    @property
    def is_complete(self) -> bool:
        return self.r == self.n

    @property
    def log_values(self) -> np.ndarray:
        return self._log_values

    def __len__(self):
        return self.n


def loglik(params: BurrParams, obs: Observations) -> float:
    c, k = params.c, params.k
    lv = obs.log_values
    lp = log1p_pow(obs.values, c)
    ex = obs.exact
    exact_part = obs.r * (np.log(k) + np.log(c)) + (c - 1.0) * lv[ex].sum() - (k + 1.0) * lp[ex].sum()
    return float(exact_part - k * lp[~ex].sum())


def grid_loglik(c, k, obs: Observations) -> np.ndarray:
    """Log-likelihood at each candidate pair ``(c[i], k[i])``.

    Non-positive candidates get ``-inf``.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    k = np.atleast_1d(np.asarray(k, dtype=float))
    ok = (c > 0) & (k > 0) & np.isfinite(c) & np.isfinite(k)
    cs = np.where(ok, c, 1.0)
    ks = np.where(ok, k, 1.0)
    ex = obs.exact
    lv_exact_sum = obs.log_values[ex].sum()
    t = cs[:, None] * obs.log_values[None, :]
    lp = np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))
    s_exact = lp[:, ex].sum(axis=1)
    s_cens = lp[:, ~ex].sum(axis=1)
    out = obs.r * (np.log(ks) + np.log(cs)) + (cs - 1.0) * lv_exact_sum - (ks + 1.0) * s_exact - ks * s_cens
    return np.where(ok, out, -np.inf)


def score(params: BurrParams, obs: Observations) -> tuple[float, float]:
    """Analytic gradient ``(d/dc, d/dk)`` of :func:`loglik`.

    ``x^c log(x) / (1 + x^c)`` is evaluated as ``expit(c log x) * log x``.
    """
    c, k = params.c, params.k
    lv = obs.log_values
    ex = obs.exact
    w = expit(c * lv) * lv
    dc = obs.r / c + lv[ex].sum() - (k + 1.0) * w[ex].sum() - k * w[~ex].sum()
    dk = obs.r / k - log1p_pow(obs.values, c).sum()
    return float(dc), float(dk)


def profile_k(c: float, obs: Observations) -> float:
    """Maximizer of the likelihood in ``k`` at fixed ``c``: ``r / sum log(1 + x^c)``."""
    if obs.r == 0:
        raise NoExactObservations("profile k requires at least one exact observation")
    if not c > 0:
        raise DomainError("c must be > 0")
    return obs.r / float(log1p_pow(obs.values, c).sum())
