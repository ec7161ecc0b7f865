import math
import warnings

import numpy as np
import pytest

from burrce.baselines import nr_fit
from burrce.ce import (
    CeConfig,
    CeState,
    draw_candidates,
    fit_mle,
    maximize,
    select_elites,
    truncated_normal,
    update_state,
)
from burrce.dist import BurrParams, sample
from burrce.errors import AllInfeasible, DomainError, NoExactObservations, WingoWarning
from burrce.likelihood import Observations, grid_loglik
from burrce.simulation import generate_censored


def test_config_defaults_and_validation():
    cfg = CeConfig()
    assert (cfg.population, cfg.elite_fraction, cfg.mean_smoothing, cfg.std_smoothing) == (100, 0.1, 0.8, 0.6)
    assert (cfg.stop_threshold, cfg.init_mean, cfg.init_std, cfg.max_iterations) == (0.005, 0.0, 10.0, 500)
    assert cfg.n_elite == 10
    assert CeConfig(population=30).n_elite == 3
    with pytest.raises(DomainError):
        CeConfig(population=10)  # one elite
    with pytest.raises(DomainError):
        CeConfig(stop_threshold=0)
    with pytest.raises(DomainError):
        CeConfig(init_std=-1)


def test_truncated_normal_positive_for_all_uniforms():
    w = np.linspace(1e-12, 1, 10001)
    assert np.all(truncated_normal(0.0, 10.0, w) > 0)
    assert np.all(truncated_normal(-50.0, 1.0, w) > 0)
    assert np.all(truncated_normal(-1e4, 1.0, w) > 0)


def test_truncated_normal_degenerate_sigma():
    w = np.random.default_rng(0).random(1000) + 1e-16
    np.testing.assert_allclose(truncated_normal(5.0, 1e-9, w), 5.0, atol=1e-6)


def test_truncated_normal_half_normal_mean():
    rng = np.random.default_rng(1)
    w = 1.0 - rng.random(1_000_000)
    m = truncated_normal(0.0, 10.0, w).mean()
    assert m == pytest.approx(10 * math.sqrt(2 / math.pi), rel=0.01)


def test_truncated_normal_matches_scipy_law():
    from scipy.stats import kstest, truncnorm

    rng = np.random.default_rng(2)
    mu, sigma = 1.5, 2.0
    x = truncated_normal(mu, sigma, 1.0 - rng.random(20000))
    ref = truncnorm(-mu / sigma, np.inf, loc=mu, scale=sigma)
    assert kstest(x, ref.cdf).pvalue > 0.01


def test_draw_candidates_shape_and_determinism():
    cfg = CeConfig()
    s = CeState.initial(cfg)
    a = draw_candidates(s, cfg, np.random.default_rng(5))
    b = draw_candidates(s, cfg, np.random.default_rng(5))
    assert a.shape == (100, 2)
    np.testing.assert_array_equal(a, b)
    assert np.all(a > 0)


def test_select_elites_trivial():
    assert list(select_elites([1, 3, 2], 1)) == [1]
    assert list(select_elites([5, 5, 1], 1)) == [0]
    with pytest.raises(AllInfeasible):
        select_elites([np.nan, -np.inf, np.inf], 1)


def test_select_elites_matches_sort_oracle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        obj = rng.normal(size=100).round(1)  # rounding creates ties
        obj[rng.choice(100, 20, replace=False)] = np.nan
        got = list(select_elites(obj, 10))
        finite = [(-v, i) for i, v in enumerate(obj) if np.isfinite(v)]
        want = [i for _, i in sorted(finite)[:10]]
        assert got == want


def test_update_state_trivial():
    cfg = CeConfig(mean_smoothing=1.0, std_smoothing=1.0)
    s = CeState(mean=np.array([9.0, 9.0]), std=np.array([4.0, 4.0]))
    new = update_state(s, [(1, 2), (3, 4)], cfg)
    np.testing.assert_allclose(new.mean, [2, 3])
    np.testing.assert_allclose(new.std, [1, 1])
    assert new.iteration == 1

    cfg = CeConfig()
    s = CeState(mean=np.array([1.0, 1.0]), std=np.array([1.0, 1.0]))
    new = update_state(s, [(2, 2)] * 10, cfg)
    assert new.mean[0] == pytest.approx(1.8)
    assert new.std[0] == pytest.approx(0.4)


def test_update_state_two_pass_oracle():
    rng = np.random.default_rng(8)
    cfg = CeConfig()
    for _ in range(20):
        elites = rng.uniform(0.1, 10, (10, 2))
        prev = CeState(mean=rng.uniform(0, 5, 2), std=rng.uniform(0.1, 3, 2))
        new = update_state(prev, elites, cfg, rng.normal(size=10))
        for j in range(2):
            col = [float(v) for v in elites[:, j]]
            m = sum(col) / len(col)
            sd = math.sqrt(sum((v - m) ** 2 for v in col) / len(col))
            assert new.mean[j] == pytest.approx(0.8 * m + 0.2 * prev.mean[j], rel=1e-12, abs=1e-12)
            assert new.std[j] == pytest.approx(0.6 * sd + 0.4 * prev.std[j], rel=1e-12, abs=1e-12)


def test_update_state_tracks_best():
    cfg = CeConfig()
    s = CeState(mean=np.ones(2), std=np.ones(2), best=(1.0, 1.0, 5.0))
    kept = update_state(s, [(2, 2), (3, 3)], cfg, [4.0, 3.0])
    assert kept.best == (1.0, 1.0, 5.0)
    moved = update_state(s, [(2, 2), (3, 3)], cfg, [4.0, 6.0])
    assert moved.best == (3.0, 3.0, 6.0)


def test_maximize_quadratic():
    out = maximize(lambda c, k: -((c - 3) ** 2 + (k - 7) ** 2), rng=np.random.default_rng(0))
    assert out.converged
    assert abs(out.c - 3) < 0.01 and abs(out.k - 7) < 0.01


def test_maximize_constant_objective():
    out = maximize(lambda c, k: 0.0, rng=np.random.default_rng(1))
    assert out.converged and out.objective == 0.0
    assert out.c > 0 and out.k > 0


def test_maximize_all_infeasible():
    with pytest.raises(AllInfeasible):
        maximize(lambda c, k: math.nan, rng=np.random.default_rng(0))


def test_maximize_invariants_per_iteration():
    x = sample(BurrParams(2, 5), 300, np.random.default_rng(3))
    obs = Observations.complete(x)
    cfg = CeConfig()
    seen = []

    def cb(state, cand, obj):
        assert np.all(cand > 0)
        assert np.all(state.std > 0)
        seen.append(state.best_value)

    out = maximize(lambda c, k: grid_loglik(c, k, obs), cfg, np.random.default_rng(4), vectorized=True, callback=cb)
    assert out.converged
    assert all(b >= a for a, b in zip(seen, seen[1:]))
    assert out.state.std.max() < cfg.stop_threshold


def test_maximize_seed_determinism_trajectory():
    x = sample(BurrParams(3, 4), 200, np.random.default_rng(5))
    obs = Observations.complete(x)

    def run():
        traj = []
        maximize(
            lambda c, k: grid_loglik(c, k, obs),
            rng=np.random.default_rng(99),
            vectorized=True,
            callback=lambda s, cand, obj: traj.append((s.mean.copy(), s.std.copy(), cand.copy())),
        )
        return traj

    a, b = run(), run()
    assert len(a) == len(b)
    for (m1, s1, c1), (m2, s2, c2) in zip(a, b):
        np.testing.assert_array_equal(m1, m2)
        np.testing.assert_array_equal(s1, s2)
        np.testing.assert_array_equal(c1, c2)


def test_max_iterations_cap():
    out = maximize(lambda c, k: -((c - 3) ** 2 + (k - 7) ** 2), CeConfig(max_iterations=3), np.random.default_rng(0))
    assert out.iterations == 3 and not out.converged


def test_fit_mle_not_worse_than_nr():
    x = sample(BurrParams(2, 5), 1000, np.random.default_rng(42))
    obs = Observations.complete(x)
    ce = fit_mle(obs, rng=np.random.default_rng(43))
    nr = nr_fit(obs)
    assert ce.converged
    assert ce.loglik >= nr.loglik - 1e-4


def test_fit_mle_complete_reference_band():
    # reference replication means at n=1000: c 2.0057 (std 0.0455), mean k 5.0092 (std 0.192)
    x = sample(BurrParams(2, 5), 1000, np.random.default_rng(2009))
    fit = fit_mle(Observations.complete(x), rng=np.random.default_rng(1))
    assert abs(fit.c - 2.0057) < 3 * 0.0455
    assert abs(fit.k - 5.0092) < 3 * 0.192


def test_fit_mle_censored_reference_band():
    # reference replication mean at CL=0.2, n=100: c 2.0374, std 0.1683
    obs = generate_censored(BurrParams(2, 5), 100, 0.2, np.random.default_rng(2010))
    fit = fit_mle(obs, rng=np.random.default_rng(1))
    assert abs(fit.c - 2.0374) < 3 * 0.1683


def test_fit_mle_deterministic():
    obs = generate_censored(BurrParams(2, 5), 100, 0.2, np.random.default_rng(3))
    a = fit_mle(obs, rng=np.random.default_rng(11))
    b = fit_mle(obs, rng=np.random.default_rng(11))
    assert (a.c, a.k, a.loglik, a.iterations) == (b.c, b.k, b.loglik, b.iterations)


def test_fit_mle_errors_and_wingo():
    with pytest.raises(NoExactObservations):
        fit_mle(Observations([0.5, 0.7], [False, False]), rng=np.random.default_rng(0))
    obs = Observations.complete([1.5, 2.0, 3.0, 4.0, 8.0])
    with pytest.warns(WingoWarning):
        fit_mle(obs, rng=np.random.default_rng(0))
    with warnings.catch_warnings():
        warnings.simplefilter("error", WingoWarning)
        fit_mle(Observations.complete([0.5, 2.0, 3.0]), rng=np.random.default_rng(0))
