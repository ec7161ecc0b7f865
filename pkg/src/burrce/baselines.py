"""Comparison estimators: profile Newton-Raphson and Monte Carlo EM.

Newton-Raphson works on the one-dimensional profile score

    g(c) = d loglik / dc  evaluated at (c, profile_k(c)),

which is also the derivative of the profile log-likelihood. EM treats
censored values as missing lifetimes beyond their censoring points; its
E-step averages over conditional draws, and its M-step maximizes the
resulting Q-function in ``c`` by golden-section search with ``k`` solved in
closed form.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .dist import BurrParams, _log_expm1, log1p_pow
from .errors import DomainError, NoExactObservations, NoRoot
from .likelihood import Observations, loglik, profile_k, score
from .result import FitResult

__all__ = [
    "NrConfig",
    "EmConfig",
    "profile_score",
    "nr_fit",
    "em_conditional_density",
    "em_truncated_sample",
    "em_fit",
    "golden_section_max",
]

_BISECT_BRACKET = (1e-3, 1e3)
_SCAN_RANGE = (1e-2, 1e2)
_SCAN_POINTS = 41


@dataclass(frozen=True)
class NrConfig:
    """``c_init=None`` selects automatic initialisation.

    ``fix_c`` holds ``c`` at ``c_init`` and only profiles ``k``.
    """

    tol: float = 1e-10
    max_iter: int = 200
    c_init: float | None = None
    fix_c: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be > 0")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if self.c_init is not None and not self.c_init > 0:
            raise DomainError("c_init must be > 0")
        if self.fix_c and self.c_init is None:
            raise DomainError("fix_c requires c_init")

    @classmethod
    def from_dict(cls, d: dict | None) -> "NrConfig":
        return replace(cls(), **(d or {}))


@dataclass(frozen=True)
class EmConfig:
    mc_samples: int = 1000
    tol: float = 1e-6
    max_iter: int = 500

    def __post_init__(self):
        if self.mc_samples < 10:
            raise DomainError("mc_samples must be >= 10")
        if not self.tol > 0:
            raise DomainError("tol must be > 0")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")

    @classmethod
    def from_dict(cls, d: dict | None) -> "EmConfig":
        return replace(cls(), **(d or {}))


# -- Newton-Raphson ----------------------------------------------------------


def profile_score(c: float, obs: Observations) -> float:
    return score(BurrParams(c, profile_k(c, obs)), obs)[0]


def _newton_bracketed(g, lo, hi, g_lo, c0, cfg: NrConfig):
    """Safeguarded Newton inside a sign-change bracket ``[lo, hi]``.

    Steps that leave the bracket or fail to shrink ``|g|`` fall back to
    bisection, so the iterate never escapes.
    """
    c = c0 if lo < c0 < hi else 0.5 * (lo + hi)
    gc = g(c)
    for it in range(1, cfg.max_iter + 1):
        if abs(gc) < cfg.tol:
            return c, it, True
        if (gc > 0) == (g_lo > 0):
            lo, g_lo = c, gc
        else:
            hi = c
        h = 1e-6 * max(1.0, c)
        dg = (g(c + h) - g(c - h)) / (2.0 * h) if c - h > 0 else math.nan
        step_ok = False
        if math.isfinite(dg) and dg != 0.0:
            cn = c - gc / dg
            if lo < cn < hi:
                gn = g(cn)
                if abs(gn) < abs(gc):
                    step_ok = True
        if not step_ok:
            cn = 0.5 * (lo + hi)
            gn = g(cn)
        if abs(cn - c) <= 4 * np.finfo(float).eps * c:
            return cn, it, abs(gn) < max(cfg.tol, 1e-6)
        c, gc = cn, gn
    return c, cfg.max_iter, abs(gc) < cfg.tol


def _plain_newton(g, c0, cfg: NrConfig):
    c = c0
    for it in range(1, cfg.max_iter + 1):
        gc = g(c)
        if not math.isfinite(gc):
            return c, it, False
        if abs(gc) < cfg.tol:
            return c, it, True
        h = 1e-6 * max(1.0, c)
        if c - h <= 0:
            return c, it, False
        dg = (g(c + h) - g(c - h)) / (2.0 * h)
        if not math.isfinite(dg) or dg == 0.0:
            return c, it, False
        cn = c - gc / dg
        if not cn > 0:
            return c, it, False
        c = cn
    return c, cfg.max_iter, False


def _find_bracket(g, lo, hi, points):
    grid = np.geomspace(lo, hi, points)
    vals = [g(float(c)) for c in grid]
    for a, b, ga, gb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if math.isfinite(ga) and math.isfinite(gb) and ga > 0 >= gb:
            return float(a), float(b), ga
    return None


def nr_fit(obs: Observations, cfg: NrConfig | None = None) -> FitResult:
    """Solve the profile score equation for ``c``, then set ``k = profile_k(c)``.

    With ``c_init=None``, a log-spaced scan over ``[1e-2, 1e2]`` looks for a
    sign change of ``g`` and Newton runs inside it. Otherwise Newton starts
    at ``c_init``; if it fails, bisection over ``[1e-3, 1e3]`` is tried.

    Raises
    ------
    NoExactObservations
        When every observation is censored.
    NoRoot
        When Newton fails and ``g`` has no sign change in ``[1e-3, 1e3]``.
    """
    cfg = cfg or NrConfig()
    if obs.r == 0:
        raise NoExactObservations("cannot fit: every observation is censored")
    t0 = time.perf_counter()

    def g(c):
        return profile_score(c, obs)

    if cfg.fix_c:
        c, iters, ok = cfg.c_init, 0, True
    else:
        found = None
        if cfg.c_init is None:
            br = _find_bracket(g, *_SCAN_RANGE, _SCAN_POINTS)
            if br is not None:
                found = _newton_bracketed(g, br[0], br[1], br[2], 1.0, cfg)
        else:
            found = _plain_newton(g, float(cfg.c_init), cfg)
            if not found[2]:
                found = None
        if found is None or not found[2]:
            br = _find_bracket(g, *_BISECT_BRACKET, 2 * _SCAN_POINTS)
            if br is None:
                raise NoRoot("profile score has no sign change in [1e-3, 1e3]")
            found = _newton_bracketed(g, br[0], br[1], br[2], 0.5 * (br[0] + br[1]), cfg)
        c, iters, ok = found
    k = profile_k(c, obs)
    p = BurrParams(c, k)
    return FitResult(
        c=c,
        k=k,
        loglik=loglik(p, obs),
        iterations=iters,
        converged=bool(ok),
        seconds=time.perf_counter() - t0,
        method="nr",
    )


# -- EM ----------------------------------------------------------------------


def em_conditional_density(params: BurrParams, d: float, x):
    """Density of a lifetime given it exceeds ``d``: ``f(x) / S(d)`` for ``x > d``."""
    if not d > 0:
        raise DomainError("d must be > 0")
    x = np.asarray(x, dtype=float)
    if np.any(~(x > d)):
        raise DomainError("x must exceed the censoring point d")
    c, k = params.c, params.k
    out = np.exp(
        math.log(k) + math.log(c) + k * float(log1p_pow(d, c)) + (c - 1.0) * np.log(x) - (k + 1.0) * log1p_pow(x, c)
    )
    return float(out) if out.ndim == 0 else out


def _conditional_log_values(params: BurrParams, d, u):
    """``log x`` for ``x = ((S(d) u)^(-1/k) - 1)^(1/c)``; broadcasts ``d`` against ``u``."""
    log_xc = log1p_pow(d, params.c) - np.log(u) / params.k
    return _log_expm1(log_xc) / params.c


def em_truncated_sample(params: BurrParams, d: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` draws from the law of ``X`` given ``X > d``."""
    if not d > 0:
        raise DomainError("d must be > 0")
    u = 1.0 - rng.random(int(count))
    x = np.exp(_conditional_log_values(params, d, u))
    # rounding can land exactly on d when S(d) u is within an ulp of S(d)
    return np.maximum(x, np.nextafter(d, np.inf))


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-11, max_iter: int = 200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


class _QFunction:
    """Monte Carlo Q-function for one E-step.

    ``log_draws[j, m]`` holds ``log x`` for the m-th conditional draw of
    censored unit ``j``. The same draws serve every candidate ``c``.
    """

    def __init__(self, obs: Observations, log_draws: np.ndarray):
        self.n = obs.n
        self.exact_values = obs.values[obs.exact]
        self.log_draws = log_draws
        self.sum_log = obs.log_values[obs.exact].sum() + log_draws.mean(axis=1).sum()

    def _tail_sum(self, c: float) -> float:
        s = float(log1p_pow(self.exact_values, c).sum())
        if self.log_draws.size:
            t = c * self.log_draws
            lp = np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))
            s += float(lp.mean(axis=1).sum())
        return s

    def profile(self, c: float) -> tuple[float, float]:
        """``(Q(c, k(c)), k(c))`` with ``k(c) = n / S(c)`` from ``dQ/dk = 0``."""
        s = self._tail_sum(c)
        k = self.n / s
        q = self.n * (math.log(c) + math.log(k)) + (c - 1.0) * self.sum_log - (k + 1.0) * s
        return q, k

    def argmax(self) -> tuple[float, float, float]:
        lo, hi = (math.log(b) for b in _BISECT_BRACKET)
        z, q = golden_section_max(lambda z: self.profile(math.exp(z))[0], lo, hi)
        c = math.exp(z)
        return c, self.profile(c)[1], q


def em_fit(obs: Observations, cfg: EmConfig | None = None, rng: np.random.Generator | None = None) -> FitResult:
    """Monte Carlo EM for multiply right-censored data.

    Each censored unit gets ``mc_samples`` uniforms once, up front; every
    E-step pushes those same uniforms through the conditional inverse cdf
    under the current parameters. This keeps the EM map deterministic, so
    the ``tol`` stopping rule is reachable despite Monte Carlo error.

    The result's ``extra`` holds ``q_trace`` and ``loglik_trace`` (one entry
    per iteration).
    """
    cfg = cfg or EmConfig()
    rng = rng if rng is not None else np.random.default_rng()
    if obs.r == 0:
        raise NoExactObservations("cannot fit: every observation is censored")
    t0 = time.perf_counter()
    d = obs.values[~obs.exact]
    u = 1.0 - rng.random((d.size, cfg.mc_samples))
    c, k = 1.0, profile_k(1.0, obs)
    q_trace: list[float] = []
    ll_trace: list[float] = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        p = BurrParams(c, k)
        log_draws = _conditional_log_values(p, d[:, None], u) if d.size else np.empty((0, cfg.mc_samples))
        c_new, k_new, q = _QFunction(obs, log_draws).argmax()
        q_trace.append(q)
        ll_trace.append(loglik(BurrParams(c_new, k_new), obs))
        delta = max(abs(c_new - c), abs(k_new - k))
        c, k = c_new, k_new
        if delta < cfg.tol:
            converged = True
            break
    p = BurrParams(c, k)
    return FitResult(
        c=c,
        k=k,
        loglik=loglik(p, obs),
        iterations=it,
        converged=converged,
        seconds=time.perf_counter() - t0,
        method="em",
        extra={"q_trace": q_trace, "loglik_trace": ll_trace},
    )
