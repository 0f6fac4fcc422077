"""Finite truncations of the l2 counterexample.

With ``e~_n = e_1/2 + (sqrt(3)/2) e_n`` and ``h_n(x) = <x, e~_n>``,

    f(x) = sum_{n>=2} h_n(x)^{2n},      F = f + |x|^2 / 2,

is convex, bounded by 49/24 on the unit ball, yet the tangent planes of ``F``
at the points ``e~_k`` evaluated at ``r e_1`` (``r > 2``) grow at least like
``k (r - 2)``.  So the least convex extension of ``F`` from the ball is
``+inf`` there.  Here the series is cut at ``n = K`` inside ``R^dim``, with
coordinate ``x[0]`` playing ``x_1`` and ``x[n-1]`` playing ``x_n``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .samplers import uniform_ball_points

SQ3_2 = math.sqrt(3.0) / 2.0
BALL_BOUND = 49.0 / 24.0
TRUNC_TOL = 1e-12


class DomainError(ValueError):
    """Evaluation point outside ``|x| < 2``."""


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CexConfig:
    dim: int
    K: int
    r: float = 3.0
    k: int = 2

    def __post_init__(self):
        if self.K < 2 or self.dim < self.K:
            raise ValueError(f"need 2 <= K <= dim, got K={self.K}, dim={self.dim}")
        if not 2 <= self.k <= self.dim:
            raise ValueError(f"tangent index k={self.k} outside [2, {self.dim}]")

    @classmethod
    def for_tangent(cls, k: int, r: float = 3.0, K: int | None = None) -> "CexConfig":
        K = 2 * k + 20 if K is None else K
        return cls(dim=K, K=K, r=r, k=k)


@dataclass(frozen=True)
class CexReport:
    k: int
    r: float
    K: int
    f_value: float
    F_value: float
    grad_F: np.ndarray
    tangent_direct: float
    tangent_closed_form: float
    tangent_infinite: float  # closed form with the full series
    lower_bound: float


def e_tilde(n: int, dim: int) -> np.ndarray:
    v = np.zeros(dim)
    v[0] = 0.5
    v[n - 1] += SQ3_2
    return v


def _h(x: np.ndarray, K: int) -> np.ndarray:
    """``h_n(x)`` for ``n = 2..K``."""
    return 0.5 * x[0] + SQ3_2 * x[1:K]


def _check(x, K: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if K < 2 or x.shape[0] < K:
        raise ValueError(f"need 2 <= K <= dim(x), got K={K}, dim={x.shape[0]}")
    if not np.linalg.norm(x) < 2.0:
        raise DomainError(f"|x| = {np.linalg.norm(x):.6g} is outside the domain |x| < 2")
    return x


def eval_f(x, K: int | None = None) -> float:
    x = _check(x, len(np.atleast_1d(x)) if K is None else K)
    K = x.shape[0] if K is None else K
    n = np.arange(2, K + 1)
    return float(np.sum(_h(x, K) ** (2 * n)))


def eval_F_and_grad(x, K: int | None = None) -> tuple[float, np.ndarray]:
    x = _check(x, len(np.atleast_1d(x)) if K is None else K)
    K = x.shape[0] if K is None else K
    n = np.arange(2, K + 1)
    h = _h(x, K)
    dh = 2 * n * h ** (2 * n - 1)
    grad = x.copy()
    grad[0] += 0.5 * dh.sum()
    grad[1:K] += SQ3_2 * dh
    return float(np.sum(h ** (2 * n)) + 0.5 * x @ x), grad


def second_difference(x, v, h: float = 1e-3, K: int | None = None) -> float:
    """Central second difference of ``F`` at ``x`` along the unit vector ``v``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    Fp, _ = eval_F_and_grad(x + h * v, K)
    F0, _ = eval_F_and_grad(x, K)
    Fm, _ = eval_F_and_grad(x - h * v, K)
    return (Fp - 2.0 * F0 + Fm) / h**2


# series pieces at the points e~_k, where h_n(e~_k) = 1/4 for n != k
def sixteenth_sum(K: int | None) -> float:
    """``sum_{n=2..K} 16^{-n}`` (``K=None``: full series)."""
    q = 1.0 / 16.0
    if K is None:
        return q * q / (1.0 - q)
    return float(np.sum(q ** np.arange(2, K + 1)))


def slope_sum(K: int | None) -> float:
    """``sum_{n=2..K} 2n (1/4)^{2n-1}`` (``K=None``: full series)."""
    q = 1.0 / 16.0
    if K is None:
        # 2n 4^{1-2n} = 8 n 16^{-n};  sum_{n>=2} n q^n = q/(1-q)^2 - q
        return 8.0 * (q / (1.0 - q) ** 2 - q)
    n = np.arange(2, K + 1)
    return float(np.sum(2 * n * 0.25 ** (2 * n - 1)))


def series_partial_sums(tol: float = 0.0) -> tuple[float, float]:
    """Both series summed term by term until terms fall below ``tol`` (or underflow)."""
    a = b = 0.0
    n = 2
    while True:
        ta = 16.0**-n
        tb = 2 * n * 0.25 ** (2 * n - 1)
        if ta + tb <= tol or a + ta == a and b + tb == b:
            return a, b
        a += ta
        b += tb
        n += 1


def tangent_closed_form(k: int, r: float, K: int | None = None) -> float:
    """Tangent-plane value of ``F`` at ``e~_k`` evaluated at ``r e_1``, summed to ``K``."""
    A = sixteenth_sum(K) - 16.0**-k
    B = slope_sum(K) - 2 * k * 0.25 ** (2 * k - 1)
    return 1.0 + A + 0.5 + B * (r / 2 - 0.25) + 2 * k * (r / 2 - 1) + (r / 2 - 1)


def tangent_value(cfg: CexConfig) -> CexReport:
    k, r, K = cfg.k, cfg.r, cfg.K
    if k > K:
        raise ValueError(f"tangent index k={k} exceeds the truncation K={K}")
    ek = e_tilde(k, cfg.dim)
    F, g = eval_F_and_grad(ek, K)
    x = np.zeros(cfg.dim)
    x[0] = r
    direct = F + g @ (x - ek)
    closed = tangent_closed_form(k, r, K)
    full = tangent_closed_form(k, r, None)
    if abs(full - closed) > TRUNC_TOL * (1.0 + abs(full)):
        warnings.warn(f"truncation at K={K} leaves a tail of {full - closed:.3e}",
                      TruncationWarning, stacklevel=2)
    return CexReport(k, r, K, eval_f(ek, K), F, g, float(direct), closed, full, k * (r - 2.0))


def ball_bound_scan(dim: int, K: int | None = None, samples: int = 10_000,
                    seed: int = 0) -> float:
    """Largest sampled value of ``f`` on the unit ball."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    K = dim if K is None else K
    # Gaussian direction times U^{1/dim} radius is exactly uniform on the ball
    X = uniform_ball_points(samples, dim, np.random.default_rng(seed))
    n = np.arange(2, K + 1)
    H = 0.5 * X[:, :1] + SQ3_2 * X[:, 1:K]
    return float(np.max(np.sum(H ** (2 * n), axis=1)))


def auxiliary_maxima() -> dict[str, tuple[float, float]]:
    """Numerical maximisers on [0, 1] of the two one-variable bounds, as (t*, value)."""
    g = lambda t: 0.5 * t + SQ3_2 * math.sqrt(1.0 - t * t)
    h = lambda t: 0.5 * t + SQ3_2 * math.sqrt((1.0 - t * t) / 2.0)
    out = {}
    for name, fn in (("g", g), ("h", h)):
        res = minimize_scalar(lambda t: -fn(t), bounds=(0.0, 1.0), method="bounded",
                              options={"xatol": 1e-10})
        out[name] = (float(res.x), fn(float(res.x)))
    return out


def mc_divergence_sweep(r: float, k_list, K: int | None = None) -> list[CexReport]:
    """Tangent values at ``r e_1`` for each ``k``; each is at least ``k (r - 2)``."""
    if not r > 2:
        raise ValueError(f"the divergence regime needs r > 2, got {r}")
    out = []
    for k in k_list:
        cfg = CexConfig.for_tangent(int(k), r, K)
        out.append(tangent_value(cfg))
    return out
