"""Cross-entropy maximization over the positive quadrant ``(c, k) > 0``.

Each generation draws ``N`` candidates from independent normals truncated
to ``(0, inf)``, keeps the ``ceil(rho N)`` best as elites, refits the
proposal's means and (population) standard deviations to the elites, then
smooths them against the previous generation:

    mu    <- alpha * mu_elite    + (1 - alpha) * mu
    sigma <- beta  * sigma_elite + (1 - beta)  * sigma

The loop stops once ``max(sigma_c, sigma_k)`` falls below ``eps``.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import AllInfeasible, DomainError, NoExactObservations, WingoWarning
from .likelihood import Observations, grid_loglik
from .result import FitResult

__all__ = [
    "CeConfig",
    "CeState",
    "CeOutcome",
    "truncated_normal",
    "draw_candidates",
    "select_elites",
    "update_state",
    "maximize",
    "fit_mle",
    "check_wingo",
]

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class CeConfig:
    population: int = 100
    elite_fraction: float = 0.1
    mean_smoothing: float = 0.8
    std_smoothing: float = 0.6
    stop_threshold: float = 0.005
    init_mean: float = 0.0
    init_std: float = 10.0
    max_iterations: int = 500

    def __post_init__(self):
        if int(self.population) != self.population or self.population < 2:
            raise DomainError("population must be an integer >= 2")
        if not 0.0 < self.elite_fraction < 1.0:
            raise DomainError("elite_fraction must lie in (0, 1)")
        if self.n_elite < 2:
            raise DomainError("ceil(elite_fraction * population) must be >= 2")
        for name in ("mean_smoothing", "std_smoothing"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1]")
        if not self.stop_threshold > 0:
            raise DomainError("stop_threshold must be > 0")
        if not self.init_std > 0:
            raise DomainError("init_std must be > 0")
        if not math.isfinite(self.init_mean):
            raise DomainError("init_mean must be finite")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise DomainError("max_iterations must be a positive integer")

    @property
    def n_elite(self) -> int:
        # round() absorbs float noise such as 0.1 * 30 = 3.0000000000000004
        return math.ceil(round(self.elite_fraction * self.population, 9))

    @classmethod
    def from_dict(cls, d: dict | None) -> "CeConfig":
        return replace(cls(), **(d or {}))


@dataclass
class CeState:
    """Proposal parameters ``(mu_c, mu_k)`` / ``(sigma_c, sigma_k)`` plus the incumbent."""

    mean: np.ndarray
    std: np.ndarray
    iteration: int = 0
    best: tuple[float, float, float] = (math.nan, math.nan, -math.inf)

    @classmethod
    def initial(cls, cfg: CeConfig) -> "CeState":
        return cls(
            mean=np.full(2, float(cfg.init_mean)),
            std=np.full(2, float(cfg.init_std)),
        )

    @property
    def best_value(self) -> float:
        return self.best[2]


@dataclass
class CeOutcome:
    c: float
    k: float
    objective: float
    iterations: int
    converged: bool
    state: CeState = field(repr=False)


def truncated_normal(mu, sigma, w):
    """Map uniforms ``w`` in ``(0, 1]`` to ``N(mu, sigma^2)`` truncated to ``(0, inf)``.

    Inverse cdf on the mirrored tail: with ``p = Phi(mu / sigma)``, returns
    ``mu - sigma * Phi^-1(p w)``, the same law as ``mu + sigma Phi^-1(u)``
    with ``u ~ U(Phi(-mu/sigma), 1)`` but without cancellation when
    ``mu << 0``.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    p = ndtr(mu / sigma)
    x = mu - sigma * ndtri(p * w)
    # p * w == p can round x to 0 or a hair below
    return np.maximum(x, _TINY)


def draw_candidates(state: CeState, cfg: CeConfig, rng: np.random.Generator) -> np.ndarray:
    """``(N, 2)`` array of strictly positive ``(c, k)`` candidates."""
    w = 1.0 - rng.random((cfg.population, 2))
    return truncated_normal(state.mean[None, :], state.std[None, :], w)


def select_elites(objectives, n_elite: int) -> np.ndarray:
    """Indices of the ``n_elite`` largest finite objectives, ties to the lower index.

    Fewer indices come back when fewer finite values exist.
    """
    obj = np.asarray(objectives, dtype=float)
    finite = np.isfinite(obj)
    if not finite.any():
        raise AllInfeasible("no candidate has a finite objective")
    key = np.where(finite, -obj, np.inf)
    order = np.argsort(key, kind="stable")[:n_elite]
    return order[finite[order]]


def update_state(state: CeState, elites, cfg: CeConfig, elite_objectives=None) -> CeState:
    elites = np.asarray(elites, dtype=float).reshape(-1, 2)
    mu_e = elites.mean(axis=0)
    sd_e = np.sqrt(((elites - mu_e) ** 2).mean(axis=0))
    a, b = cfg.mean_smoothing, cfg.std_smoothing
    mean = a * mu_e + (1.0 - a) * state.mean
    std = np.maximum(b * sd_e + (1.0 - b) * state.std, _TINY)
    best = state.best
    if elite_objectives is not None:
        vals = np.asarray(elite_objectives, dtype=float)
        i = int(np.argmax(vals))
        if vals[i] > best[2]:
            best = (float(elites[i, 0]), float(elites[i, 1]), float(vals[i]))
    return CeState(mean=mean, std=std, iteration=state.iteration + 1, best=best)


def maximize(
    objective: Callable,
    cfg: CeConfig | None = None,
    rng: np.random.Generator | None = None,
    *,
    vectorized: bool = False,
    callback: Callable[[CeState, np.ndarray, np.ndarray], None] | None = None,
) -> CeOutcome:
    """Maximize ``objective(c, k)`` over ``c, k > 0``.

    Parameters
    ----------
    objective : callable
        ``objective(c, k) -> float``; or, with ``vectorized=True``, takes two
        arrays and returns an array. Non-finite values mark infeasible points.
    callback : callable, optional
        Called as ``callback(state, candidates, objectives)`` after every
        generation.

    Returns
    -------
    CeOutcome
        The best point ever sampled (not the final proposal mean).
        ``converged`` is True when the sigma threshold stopped the loop.
    """
    cfg = cfg or CeConfig()
    rng = rng if rng is not None else np.random.default_rng()
    state = CeState.initial(cfg)
    converged = False
    while state.iteration < cfg.max_iterations:
        cand = draw_candidates(state, cfg, rng)
        if vectorized:
            obj = np.asarray(objective(cand[:, 0], cand[:, 1]), dtype=float)
        else:
            obj = np.array([objective(float(c), float(k)) for c, k in cand], dtype=float)
        idx = select_elites(obj, cfg.n_elite)
        state = update_state(state, cand[idx], cfg, obj[idx])
        if callback is not None:
            callback(state, cand, obj)
        if state.std.max() < cfg.stop_threshold:
            converged = True
            break
    c, k, val = state.best
    return CeOutcome(c=c, k=k, objective=val, iterations=state.iteration, converged=converged, state=state)


def check_wingo(obs: Observations) -> bool:
    """Warn (and return False) when no observation is below one."""
    if obs.values.min() >= 1.0:
        warnings.warn(
            "no observation is below 1; the Burr XII MLE may not exist",
            WingoWarning,
            stacklevel=3,
        )
        return False
    return True


def fit_mle(obs: Observations, cfg: CeConfig | None = None, rng: np.random.Generator | None = None) -> FitResult:
    """Maximum-likelihood fit of ``(c, k)`` by cross-entropy search."""
    if obs.r == 0:
        raise NoExactObservations("cannot fit: every observation is censored")
    check_wingo(obs)
    t0 = time.perf_counter()
    out = maximize(lambda c, k: grid_loglik(c, k, obs), cfg, rng, vectorized=True)
    return FitResult(
        c=out.c,
        k=out.k,
        loglik=out.objective,
        iterations=out.iterations,
        converged=out.converged,
        seconds=time.perf_counter() - t0,
        method="ce",
    )
