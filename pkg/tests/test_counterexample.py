import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cw11 import counterexample as cx
from cw11.samplers import uniform_ball_points

seeds = st.integers(0, 2**32 - 1)


def test_e_tilde_geometry():
    E = np.array([cx.e_tilde(n, 30) for n in range(2, 31)])
    G = E @ E.T
    assert np.max(np.abs(np.diag(G) - 1.0)) <= 1e-15
    off = G[~np.eye(len(G), dtype=bool)]
    assert np.max(np.abs(off - 0.25)) <= 1e-15


@pytest.mark.parametrize("k", [2, 3, 7, 20])
def test_f_at_e_tilde(k):
    K = 20
    expect = 1.0 + sum(16.0**-n for n in range(2, K + 1) if n != k)
    assert cx.eval_f(cx.e_tilde(k, K), K) == pytest.approx(expect, abs=1e-14)
    F, _ = cx.eval_F_and_grad(cx.e_tilde(k, K), K)
    assert F == pytest.approx(expect + 0.5, abs=1e-14)


def test_f_simple_points():
    assert cx.eval_f(np.zeros(10)) == 0.0
    e1 = np.zeros(12)
    e1[0] = 1.0
    assert cx.eval_f(e1) == pytest.approx(sum(0.25**n for n in range(2, 13)), abs=1e-16)
    F, g = cx.eval_F_and_grad(np.zeros(5))
    assert F == 0.0 and not g.any()


def test_domain_check():
    x = np.zeros(5)
    x[0] = 2.0
    with pytest.raises(cx.DomainError):
        cx.eval_f(x)
    with pytest.raises(ValueError):
        cx.eval_f(np.zeros(3), K=5)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    X = uniform_ball_points(100, 20, rng)
    h = 1e-6
    for x in X:
        _, g = cx.eval_F_and_grad(x)
        fd = np.array([(cx.eval_F_and_grad(x + h * e)[0] - cx.eval_F_and_grad(x - h * e)[0]) / (2 * h)
                       for e in np.eye(20)])
        assert np.max(np.abs(fd - g)) <= 1e-6


@given(seeds)
def test_convexity_on_segments(seed):
    rng = np.random.default_rng(seed)
    x, y = uniform_ball_points(2, 20, rng)
    lam = rng.uniform(0, 1)
    F = lambda p: cx.eval_F_and_grad(p)[0]
    assert F(lam * x + (1 - lam) * y) <= lam * F(x) + (1 - lam) * F(y) + 1e-12


@given(seeds)
def test_strong_convexity_witness(seed):
    rng = np.random.default_rng(seed)
    x = uniform_ball_points(1, 20, rng)[0] * 0.99
    v = rng.standard_normal(20)
    v /= np.linalg.norm(v)
    assert cx.second_difference(x, v) >= 1 - 1e-4


def test_tangent_examples():
    rep = cx.tangent_value(cx.CexConfig(dim=60, K=60, r=3.0, k=20))
    assert rep.tangent_direct >= 20 and rep.lower_bound == 20
    rep = cx.tangent_value(cx.CexConfig.for_tangent(2, r=2.0))
    assert rep.lower_bound == 0 and rep.tangent_direct >= 0
    rep = cx.tangent_value(cx.CexConfig(dim=40, K=40, r=3.0, k=10))
    assert abs(rep.tangent_direct - rep.tangent_closed_form) <= 1e-9


def test_truncation_stability():
    a = cx.tangent_value(cx.CexConfig(40, 40, 3.0, 10)).tangent_direct
    b = cx.tangent_value(cx.CexConfig(80, 80, 3.0, 10)).tangent_direct
    assert abs(a - b) < 1e-10


def test_truncation_warning():
    with pytest.warns(cx.TruncationWarning):
        cx.tangent_value(cx.CexConfig(dim=6, K=6, r=3.0, k=4))


def test_config_validation():
    with pytest.raises(ValueError):
        cx.CexConfig(dim=5, K=6)
    with pytest.raises(ValueError):
        cx.CexConfig(dim=5, K=5, k=6)


def test_series_paths_agree():
    a, b = cx.series_partial_sums()
    assert a == pytest.approx(1 / 240, abs=1e-15)
    assert abs(a - cx.sixteenth_sum(None)) <= 1e-12
    assert abs(b - cx.slope_sum(None)) <= 1e-12
    assert abs(cx.sixteenth_sum(60) - cx.sixteenth_sum(None)) <= 1e-15


def test_ball_bound():
    assert cx.BALL_BOUND == pytest.approx(1 + (25 / 64) / (1 - 5 / 8), abs=1e-15)
    assert cx.ball_bound_scan(50, samples=10_000, seed=0) <= 49 / 24 + 1e-12
    # the e~_k are unit vectors, so they sit on the ball too
    for k in (2, 5, 30):
        assert cx.eval_f(cx.e_tilde(k, 50)) < 49 / 24


def test_auxiliary_maxima():
    m = cx.auxiliary_maxima()
    assert m["g"][0] == pytest.approx(0.5, abs=1e-6)
    assert m["g"][1] == pytest.approx(1.0, abs=1e-12)
    assert m["h"][0] == pytest.approx(math.sqrt(2 / 5), abs=1e-6)
    assert m["h"][1] == pytest.approx(math.sqrt(5 / 8), abs=1e-12)


def test_sweep():
    reps = cx.mc_divergence_sweep(3.0, [10, 20, 40], K=100)
    vals = [r.tangent_direct for r in reps]
    assert all(v >= k for v, k in zip(vals, [10, 20, 40]))
    assert vals == sorted(vals) and len(set(vals)) == 3
    assert cx.mc_divergence_sweep(2.1, [100])[0].tangent_direct >= 10
    with pytest.raises(ValueError):
        cx.mc_divergence_sweep(2.0, [10])
