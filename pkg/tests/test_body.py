import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import special_ortho_group

from cw11.body import (BodyData, BodyDataError, check_body, check_kw11, check_outer,
                       circle_body, sphere_body)

seeds = st.integers(0, 2**32 - 1)


def test_circle_examples():
    body = circle_body(16)
    assert check_outer(body) == pytest.approx(1.0, abs=1e-12)
    assert check_kw11(body) == pytest.approx(0.5, abs=1e-12)
    assert check_outer(circle_body(16, radius=2.0)) == pytest.approx(2.0, abs=1e-12)


def test_antipodal_parallel():
    body = BodyData([[1.0, 0.0], [-1.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]])
    rep = check_body(body)
    assert rep.delta_O == -1.0
    assert math.isinf(rep.delta_KW)
    assert rep.worst_parallel == (1, 0) and rep.parallel_slack == -2.0
    assert not rep.feasible


def test_parallel_side_condition_alone_rejects():
    # both points see each other on the wrong side of the shared normal
    body = BodyData([[1.0, 1.0], [1.0, 2.0]], [[1.0, 0.0], [1.0, 0.0]])
    rep = check_body(body)
    assert rep.delta_O > 0 and math.isinf(rep.delta_KW)
    assert rep.parallel_slack == 0.0 and rep.feasible
    body = BodyData([[1.0, 0.0], [2.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]])
    assert not check_body(body).feasible


def test_single_point():
    rep = check_body(BodyData([[2.0, 0.0]], [[1.0, 0.0]]))
    assert rep.delta_O == 2.0 and math.isinf(rep.delta_KW) and rep.feasible


def test_rejects_non_unit_normals():
    with pytest.raises(BodyDataError):
        BodyData([[1.0, 0.0]], [[1.0, 1e-5]])
    with pytest.raises(BodyDataError):
        BodyData([[1.0, 0.0]], [[1.0, 0.0, 0.0]])


@given(seeds, st.integers(2, 40), st.integers(2, 6))
def test_sphere_constants(seed, m, d):
    body = sphere_body(np.random.default_rng(seed).standard_normal((m, d)))
    rep = check_body(body)
    assert rep.delta_O == pytest.approx(1.0, abs=1e-12)
    # |y|^2 = 1 only to rounding; that error is divided by |y - x|^2
    P = body.points
    d2 = np.sum((P[:, None] - P[None]) ** 2, axis=-1)[~np.eye(m, dtype=bool)]
    assert rep.delta_KW == pytest.approx(0.5, abs=1e-12 + 1e-15 / d2.min())


@pytest.mark.parametrize("m", [16, 64, 256])
def test_circle_constants_exact_tolerance(m):
    rep = check_body(circle_body(m))
    assert rep.delta_O == pytest.approx(1.0, abs=1e-12)
    assert rep.delta_KW == pytest.approx(0.5, abs=1e-12)


@given(seeds, st.integers(3, 6))
def test_rotation_invariance(seed, d):
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((20, d))
    body = BodyData(P + rng.uniform(-0.1, 0.1, (20, d)) + 2 * P / np.linalg.norm(P, axis=1, keepdims=True),
                    P / np.linalg.norm(P, axis=1, keepdims=True))
    Q = special_ortho_group.rvs(d, random_state=seed % 2**31)
    a, b = check_body(body), check_body(body.transformed(Q))
    assert b.delta_O == pytest.approx(a.delta_O, abs=1e-12)
    assert b.delta_KW == pytest.approx(a.delta_KW, abs=1e-12 * max(1.0, abs(a.delta_KW)))


@given(seeds, st.integers(3, 30))
def test_subset_monotone(seed, m):
    rng = np.random.default_rng(seed)
    body = sphere_body(rng.standard_normal((m, 3)) * rng.uniform(0.5, 2.0, (m, 1)))
    body = BodyData(body.points * rng.uniform(0.8, 1.2, (m, 1)), body.normals)
    keep = np.sort(rng.choice(m, size=int(rng.integers(2, m)), replace=False))
    sub = BodyData(body.points[keep], body.normals[keep])
    assert check_outer(sub) >= check_outer(body)
    assert check_kw11(sub) >= check_kw11(body)
