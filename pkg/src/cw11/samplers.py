"""Random jets sampled from known convex C^{1,1} functions, for tests and experiments."""
from __future__ import annotations

import numpy as np

from .jet import Jet


def random_psd(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    B = rng.standard_normal((d, rank or d))
    return B @ B.T / d


def quadratic_jet(X, A, b=None, c: float = 0.0) -> Jet:
    """Jet of ``x -> <Ax, x>/2 + <b, x> + c`` at the rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    A = np.asarray(A, dtype=float)
    b = np.zeros(X.shape[1]) if b is None else np.asarray(b, dtype=float)
    AX = X @ A.T
    f = 0.5 * np.einsum("ik,ik->i", AX, X) + X @ b + c
    return Jet(X, f, AX + b)


def half_norm_sq_jet(X) -> Jet:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return quadratic_jet(X, np.eye(X.shape[1]))


def smooth_convex_jet(n: int, d: int, rng: np.random.Generator, box: float = 1.0) -> Jet:
    """Jet of ``<Ax, x>/2 + logsumexp(Wx + c)`` at ``n`` uniform points in ``[-box, box]^d``.

    The log-sum-exp term makes the data non-quadratic so the extension
    problems are not degenerate.
    """
    X = rng.uniform(-box, box, (n, d))
    A = random_psd(d, rng)
    W = rng.standard_normal((3, d))
    c = rng.standard_normal(3)
    Zs = X @ W.T + c
    zmax = Zs.max(axis=1, keepdims=True)
    P = np.exp(Zs - zmax)
    s = P.sum(axis=1, keepdims=True)
    f = 0.5 * np.einsum("ik,kl,il->i", X, A, X) + (zmax + np.log(s)).ravel()
    G = X @ A.T + (P / s) @ W
    return Jet(X, f, G)


def uniform_ball_points(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, d))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    return Z * rng.random(n)[:, None] ** (1.0 / d)
