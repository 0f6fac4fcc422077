import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cw11.balls import (CertificateError, PairBalls, QueryCoincidesError,
                        TightCertificateWarning, gammas, membership_margin, pair_balls,
                        phi_diagnostic, phi_matrix, solve_minimax)
from cw11.jet import InfeasibleJetError, Jet, minimal_cw11_constant
from cw11.samplers import smooth_convex_jet

seeds = st.integers(0, 2**32 - 1)


def _instance(seed, n=None, d=None):
    rng = np.random.default_rng(seed)
    d = d or int(rng.choice([1, 2, 3, 5]))
    n = n or int(rng.integers(2, 13))
    jet = smooth_convex_jet(n, d, rng)
    M = minimal_cw11_constant(jet).resolved_M()
    return jet, M, rng.uniform(-1.5, 1.5, d)


# --- construction --------------------------------------------------------------

def test_quadratic_balls(quad1d):
    balls = pair_balls(quad1d, 1.0, [0.5])
    expect = {(0, 0): 0.25, (0, 1): 0.25, (1, 0): 0.75, (1, 1): 0.75}
    assert [tuple(p) for p in balls.pairs] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    for pb in balls:
        assert pb.alpha == 0.0
        assert pb.beta == pytest.approx(0.0625, abs=1e-15)
        assert pb.center[0] == pytest.approx(expect[pb.a_idx, pb.b_idx], abs=1e-15)
        assert pb.radius == pytest.approx(0.25, abs=1e-15)


def test_single_entry_ball():
    jet = Jet.from_entries([([1.0, -1.0], 2.0, [0.5, 0.25])])
    x = np.array([2.0, 1.0])
    balls = pair_balls(jet, 3.0, x)
    assert len(balls) == 1
    np.testing.assert_allclose(balls.centers[0], [0.5, 0.25] + 1.5 * (x - [1.0, -1.0]))
    assert balls.radii[0] == pytest.approx(1.5 * np.linalg.norm(x - [1.0, -1.0]))
    res = solve_minimax(balls)
    assert res.lambda0 == 0.0
    np.testing.assert_array_equal(res.z0, balls.centers[0])


@given(st.floats(-5, 5).filter(lambda t: abs(t) > 1e-6 and abs(t - 1) > 1e-6))
def test_affine_balls_contain_gradient(x):
    jet = Jet.from_entries([([0.0], 3.0, [2.0]), ([1.0], 5.0, [2.0])])
    balls = pair_balls(jet, 1.0, [x])
    assert membership_margin(balls, [2.0]) <= 1e-12


def test_query_on_data_point(quad1d):
    with pytest.raises(QueryCoincidesError):
        pair_balls(quad1d, 1.0, [1.0])


def test_infeasible_at_M(quad1d, bad1d):
    with pytest.raises(InfeasibleJetError):
        pair_balls(quad1d, 0.5, [0.5])
    with pytest.raises(InfeasibleJetError):
        pair_balls(bad1d, 1.0, [0.5])


def test_membership_examples(quad1d):
    balls = pair_balls(quad1d, 1.0, [0.5])
    assert membership_margin(balls, [0.5]) == pytest.approx(0.0, abs=1e-15)
    assert membership_margin(balls, [0.4]) == pytest.approx(0.06, abs=1e-14)


@given(seeds)
def test_gamma_identities(seed):
    jet, M, x = _instance(seed)
    balls = pair_balls(jet, M, x)
    gam = gammas(jet, M, x)
    n = len(jet)
    a, b = balls.pairs[:, 0], balls.pairs[:, 1]
    two_z = gam.gamma1[a] + gam.gamma2[b]
    scale = 1.0 + np.max(np.abs(two_z))
    assert np.max(np.abs(two_z - 2 * balls.centers)) <= 1e-12 * scale
    beta = np.sum((0.5 * (gam.gamma1[a] - gam.gamma2[b])) ** 2, axis=1)
    assert np.max(np.abs(beta - balls.beta)) <= 1e-12 * (1.0 + np.max(beta))
    assert np.allclose(balls.radii**2, balls.alpha + balls.beta, rtol=1e-14, atol=0)
    assert balls.index(2 % n, 1 % n) == (2 % n) * n + 1 % n


# --- minimax --------------------------------------------------------------------

def test_minimax_quadratic_touching(quad1d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TightCertificateWarning)
        res = solve_minimax(pair_balls(quad1d, 1.0, [0.5]))
    assert res.lambda0 == pytest.approx(1.0, abs=1e-12)
    assert res.z0[0] == pytest.approx(0.5, abs=1e-12)


def test_minimax_singleton(singleton1d):
    balls = pair_balls(singleton1d, 1.0, [1.0])
    i = balls.index(1, 0)
    assert balls.radii[i] == 0.0 and balls.alpha[i] == 0.0
    res = solve_minimax(balls)
    assert res.singleton and res.active == [i]
    assert res.z0[0] == 1.0
    assert res.lambda0 <= 1.0
    assert membership_margin(balls, res.z0) <= 1e-12


def test_certificate_failure():
    # two disjoint balls: minimax inflation 2
    balls = PairBalls(np.array([[0, 0], [1, 1]]), np.zeros(2), np.array([1.0, 1.0]),
                      np.array([[0.0], [4.0]]), np.array([1.0, 1.0]), 1e-12)
    with pytest.raises(CertificateError) as info:
        solve_minimax(balls)
    assert info.value.result.lambda0 == pytest.approx(2.0, rel=1e-9)
    res = solve_minimax(balls, certify=False)
    assert res.z0[0] == pytest.approx(2.0, abs=1e-9)


def test_tight_warning():
    balls = PairBalls(np.array([[0, 0], [1, 1]]), np.zeros(2), np.ones(2),
                      np.array([[0.0], [2.0 + 1e-9]]), np.ones(2), 1e-12)
    with pytest.warns(TightCertificateWarning):
        res = solve_minimax(balls)
    assert 1.0 < res.lambda0 <= 1.0 + 1e-6


def _check_result(balls, res, lam_tol=1e-8):
    r = balls.radii
    ratios = np.linalg.norm(balls.centers - res.z0, axis=1) / r
    assert res.lambda0 <= 1.0 + lam_tol
    assert np.all(ratios <= res.lambda0 * (1 + 1e-9) + 1e-12)
    act = np.asarray(res.active)
    assert np.all(ratios[act] >= res.lambda0 - 1e-6 * (1 + res.lambda0))
    assert np.all(res.weights >= 0) and res.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert res.residual <= 1e-7
    eta = res.hull_weights(balls)
    np.testing.assert_allclose(eta @ balls.centers[act], res.z0, atol=1e-7 * (1 + np.abs(res.z0).max()))


@given(seeds)
def test_minimax_certificate(seed):
    jet, M, x = _instance(seed)
    balls = pair_balls(jet, M, x)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TightCertificateWarning)
        res = solve_minimax(balls)
    scale = 1.0 + float(np.max(balls.radii)) ** 2
    assert membership_margin(balls, res.z0) <= 1e-9 * scale
    if not res.singleton:
        _check_result(balls, res)


@given(seeds)
def test_minimax_is_optimal_against_random_points(seed):
    jet, M, x = _instance(seed)
    balls = pair_balls(jet, M, x)
    res = solve_minimax(balls, certify=False)
    rng = np.random.default_rng(seed + 1)
    for _ in range(50):
        z = res.z0 + rng.standard_normal(jet.dim) * 10 ** rng.uniform(-6, 0)
        pos = balls.radii > balls.r_zero_tol
        lam = np.max(np.linalg.norm(balls.centers[pos] - z, axis=1) / balls.radii[pos])
        if not res.singleton:
            assert lam >= res.lambda0 * (1 - 1e-9)


# --- phi diagnostic ------------------------------------------------------------

def test_phi_quadratic(quad1d):
    balls = pair_balls(quad1d, 1.0, [0.5])
    gam = gammas(quad1d, 1.0, [0.5])
    assert phi_diagnostic(balls, gam, (0, 1), (0, 1)) >= 0


def test_phi_affine_equality():
    jet = Jet.from_entries([([0.0, 0.0], 1.0, [1.0, -1.0]), ([1.0, 2.0], 0.0, [1.0, -1.0])])
    x = [0.3, -0.7]
    P = phi_matrix(pair_balls(jet, 1.0, x), gammas(jet, 1.0, x))
    assert P.min() >= -1e-12
    assert P.min() == pytest.approx(0.0, abs=1e-12)


@given(seeds)
def test_phi_matrix_matches_pointwise(seed):
    jet, M, x = _instance(seed, n=4)
    balls, gam = pair_balls(jet, M, x), gammas(jet, M, x)
    P = phi_matrix(balls, gam)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        i, j = rng.integers(0, len(balls), 2)
        assert P[i, j] == pytest.approx(
            phi_diagnostic(balls, gam, balls.pairs[i], balls.pairs[j]), abs=1e-12, rel=1e-12)
    assert P.min() >= -1e-9


def test_hard_instances_against_reference():
    # ball families on which earlier first-order and barrier solvers stalled;
    # reference values come from an independent SCS solve (accurate to ~1e-8)
    from conftest import FIXTURES
    data = np.load(FIXTURES / "hard_minimax.npz")
    for i in range(5):
        C, r = data[f"case{i}_centers"], data[f"case{i}_radii"]
        balls = PairBalls(np.zeros((len(r), 2), int), np.zeros(len(r)), r**2, C, r, 1e-12)
        res = solve_minimax(balls)
        assert res.lambda0 == pytest.approx(float(data[f"case{i}_lambda_ref"]), abs=1e-6)
        assert res.residual <= 1e-9
        _check_result(balls, res)
