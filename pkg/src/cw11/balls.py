"""Pairwise balls at a query point and the minimax (Kirszbraun) problem over them.

For a jet feasible at constant ``M`` and a query point ``x``, a candidate
gradient ``z`` admits a compatible value at ``x`` exactly when ``z`` lies in
every ball ``B(Z_ab, r_ab)``, ``(a, b)`` ranging over ordered pairs of entries
(diagonal included).  :func:`solve_minimax` finds the smallest uniform
inflation ``lambda0`` of all radii for which the balls meet, together with the
meeting point and a convex-combination certificate.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import clarabel
from scipy import sparse
from scipy.optimize import nnls

from .jet import REL_TOL, InfeasibleJetError, Jet, JetError, bregman_matrix, grad_diff_sq

LAMBDA_SLACK = 1e-6


class CertificateError(RuntimeError):
    """The minimax solve did not certify ``lambda0 <= 1`` (or did not converge)."""

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class QueryCoincidesError(JetError):
    pass


@dataclass(frozen=True)
class PairBall:
    a_idx: int
    b_idx: int
    alpha: float
    beta: float
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class GammaPair:
    gamma1: np.ndarray
    gamma2: np.ndarray


@dataclass(frozen=True, eq=False)
class PairBalls:
    """All pair balls for one (jet, M, x), stored as arrays in lexicographic (a, b) order."""

    pairs: np.ndarray  # (m, 2) int
    alpha: np.ndarray
    beta: np.ndarray
    centers: np.ndarray  # (m, d)
    radii: np.ndarray
    r_zero_tol: float

    def __len__(self):
        return self.radii.shape[0]

    def __getitem__(self, i) -> PairBall:
        a, b = self.pairs[i]
        return PairBall(int(a), int(b), float(self.alpha[i]), float(self.beta[i]),
                        self.centers[i], float(self.radii[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def index(self, a: int, b: int, n: int | None = None) -> int:
        n = n if n is not None else int(round(math.sqrt(len(self))))
        return a * n + b


def alpha_tolerance(jet: Jet, M: float) -> float:
    gmax = float(np.max(np.linalg.norm(jet.grads, axis=1)))
    return REL_TOL * (M * jet.scale() + gmax**2)


def pair_balls(jet: Jet, M: float, x) -> PairBalls:
    if not M > 0:
        raise ValueError(f"M must be positive, got {M}")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != jet.dim:
        raise JetError(f"query has dimension {x.shape[0]}, jet has {jet.dim}")
    X, G = jet.points, jet.grads
    dist = np.linalg.norm(X - x, axis=1)
    eps = REL_TOL * (1.0 + max(float(np.max(np.abs(X))), float(np.max(np.abs(x)))))
    if np.min(dist) <= eps:
        raise QueryCoincidesError(f"query coincides with jet entry {int(np.argmin(dist))}")

    n = len(jet)
    # alpha[a, b] = M * D(b, a) - |G(a) - G(b)|^2 / 2
    alpha = M * bregman_matrix(jet).T - 0.5 * grad_diff_sq(jet)
    tol = alpha_tolerance(jet, M)
    if np.min(alpha) < -tol:
        a, b = np.unravel_index(int(np.argmin(alpha)), alpha.shape)
        raise InfeasibleJetError(
            f"jet violates the C^{{1,1}} convex condition at M={M:g} on pair ({a}, {b}): "
            f"alpha={alpha[a, b]:.3e}"
        )
    alpha = np.maximum(alpha, 0.0)

    # shifted[b] = G(b) + M (x - b); Z_ab = (G(a) + shifted[b]) / 2
    shifted = G + M * (x - X)
    centers = 0.5 * (G[:, None, :] + shifted[None, :, :])
    half = 0.5 * (shifted[None, :, :] - G[:, None, :])
    beta = np.sum(half**2, axis=-1)
    radii = np.sqrt(alpha + beta)

    aa, bb = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    r_zero_tol = REL_TOL * (1.0 + M * float(np.max(dist)))
    return PairBalls(
        pairs=np.stack([aa.ravel(), bb.ravel()], axis=1),
        alpha=alpha.ravel(),
        beta=beta.ravel(),
        centers=centers.reshape(n * n, -1),
        radii=radii.ravel(),
        r_zero_tol=r_zero_tol,
    )


def gammas(jet: Jet, M: float, x) -> GammaPair:
    x = np.asarray(x, dtype=float).reshape(-1)
    return GammaPair(jet.grads.copy(), jet.grads + M * (x - jet.points))


def membership_margin(balls: PairBalls, z) -> float:
    """``max_i |z - c_i|^2 - r_i^2``; nonpositive iff ``z`` lies in every ball."""
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.shape[0] != balls.centers.shape[1]:
        raise ValueError("dimension mismatch between z and ball centers")
    d2 = np.sum((balls.centers - z) ** 2, axis=1)
    return float(np.max(d2 - balls.radii**2))


def phi_diagnostic(balls: PairBalls, gam: GammaPair, pair1, pair2) -> float:
    """Slack in the crucial pair-of-pairs inequality; nonnegative for feasible jets."""
    n = gam.gamma1.shape[0]
    (a, b), (c, d) = pair1, pair2
    i, j = a * n + b, c * n + d
    r2 = balls.radii**2
    Z = balls.centers
    phi = r2[i] + r2[j] - Z[i] @ Z[i] - Z[j] @ Z[j]
    return float(phi + gam.gamma1[a] @ gam.gamma2[d] + gam.gamma1[c] @ gam.gamma2[b])


def phi_matrix(balls: PairBalls, gam: GammaPair) -> np.ndarray:
    """:func:`phi_diagnostic` for every pair of pairs at once, shape ``(n^2, n^2)``."""
    n = gam.gamma1.shape[0]
    r2 = balls.radii**2 - np.sum(balls.centers**2, axis=1)
    cross = gam.gamma1 @ gam.gamma2.T  # cross[a, d] = <g1(a), g2(d)>
    a = balls.pairs[:, 0]
    b = balls.pairs[:, 1]
    # entry (i=(a,b), j=(c,d)): cross[a, d] + cross[c, b]
    t1 = cross[a[:, None], b[None, :]]
    t2 = cross[a[None, :], b[:, None]]
    return r2[:, None] + r2[None, :] + t1 + t2


@dataclass(frozen=True)
class MinimaxResult:
    lambda0: float
    z0: np.ndarray
    active: list[int]
    weights: np.ndarray
    iterations: int
    residual: float
    singleton: bool = False

    def hull_weights(self, balls: PairBalls) -> np.ndarray:
        """Convex weights expressing ``z0`` in the hull of the active centers."""
        if self.singleton or len(self.active) == 0:
            w = np.zeros(len(self.active))
            if len(w):
                w[0] = 1.0
            return w
        w = self.weights / balls.radii[self.active] ** 2
        return w / w.sum()


def _ratios(C, r, z):
    return np.linalg.norm(C - z, axis=1) / r


def _simplex_weights(V: np.ndarray) -> np.ndarray:
    """Weights on the simplex minimising ``|V @ w|`` (columns of V are vectors)."""
    k = V.shape[1]
    if k == 1:
        return np.ones(1)
    big = 1e3 * max(1.0, float(np.max(np.abs(V))))
    A = np.vstack([V, big * np.ones((1, k))])
    rhs = np.zeros(A.shape[0])
    rhs[-1] = big
    w, _ = nnls(A, rhs, maxiter=50 * k)
    s = w.sum()
    return w / s if s > 0 else np.full(k, 1.0 / k)


def _relative_residual(C, r, z, w) -> float:
    V = (z - C) / r[:, None] ** 2
    num = np.linalg.norm(w @ V)
    den = float(w @ np.linalg.norm(V, axis=1))
    return float(num / den) if den > 0 else 0.0


def _certificate(C, r, Z):
    """(lambda, Z, active indices, relative KKT residual, simplex weights) at ``Z``."""
    ratios = _ratios(C, r, Z)
    lam = float(ratios.max())
    active = np.flatnonzero(ratios >= lam - 1e-7 * (1.0 + lam))
    w = _simplex_weights(((Z - C[active]) / r[active, None] ** 2).T)
    return lam, Z, active, _relative_residual(C[active], r[active], Z, w), w


def _conic_solve(C, r, max_iter):
    """Second-order cone solve of ``min lam  s.t.  |Z - c_i| <= lam r_i``.

    Returns ``(Z, eta, iterations)`` where ``eta`` are hull-weight estimates
    from the cone duals.  Coordinates are recentred and rescaled first.
    """
    m, d = C.shape
    shift = C.mean(axis=0)
    scale = max(float(np.max(np.abs(C - shift))), float(r.max()))
    Cs, rs = (C - shift) / scale, r / scale
    # x = (Z, lam); cone block i is s = (r_i lam, Z - c_i) = b - A x
    base = np.arange(m) * (d + 1)
    rows = np.concatenate([base, (base[:, None] + 1 + np.arange(d)).ravel()])
    cols = np.concatenate([np.full(m, d), np.tile(np.arange(d), m)])
    vals = np.concatenate([-rs, -np.ones(m * d)])
    A = sparse.csc_matrix((vals, (rows, cols)), shape=(m * (d + 1), d + 1))
    b = np.zeros((m, d + 1))
    b[:, 1:] = -Cs
    q = np.zeros(d + 1)
    q[d] = 1.0

    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = settings.tol_gap_rel = settings.tol_feas = 1e-12
    settings.max_iter = max_iter
    solver = clarabel.DefaultSolver(sparse.csc_matrix((d + 1, d + 1)), q, A, b.ravel(),
                                    [clarabel.SecondOrderConeT(d + 1)] * m, settings)
    sol = solver.solve()
    if str(sol.status) not in ("Solved", "AlmostSolved"):
        raise CertificateError(f"cone solver finished with status {sol.status}")
    x = np.asarray(sol.x)
    z = np.asarray(sol.z).reshape(m, d + 1)[:, 0]
    eta = np.maximum(z, 0.0) / rs
    total = eta.sum()
    eta = eta / total if total > 0 else np.full(m, 1.0 / m)
    return shift + scale * x[:d], eta, int(sol.iterations)


def _cutting_plane(C, r, max_iter, rounds: int = 50):
    """Cone solve with constraint generation.

    Starts from the balls with the largest ratios at a weighted mean and adds
    the most violated balls until the subproblem optimum is feasible for the
    whole family (it is then optimal for it).  Returns the same triple as
    :func:`_conic_solve`, with weights scattered to all ``m`` balls.
    """
    m, d = C.shape
    batch = 4 * (d + 1)
    if m <= 3 * batch:
        return _conic_solve(C, r, max_iter)
    w = 1.0 / r**2
    z = (w @ C) / w.sum()
    work = np.argsort(-_ratios(C, r, z), kind="stable")[:batch]
    total = 0
    for _ in range(rounds):
        Z, eta, it = _conic_solve(C[work], r[work], max_iter)
        total += it
        ratios = _ratios(C, r, Z)
        lam = float(ratios[work].max())
        viol = np.flatnonzero(ratios > lam * (1.0 + 1e-11) + 1e-300)
        if viol.size == 0:
            full = np.zeros(m)
            full[work] = eta
            return Z, full, total
        viol = viol[np.argsort(-ratios[viol], kind="stable")[:batch]]
        work = np.union1d(work, viol)
    Z, eta, it = _conic_solve(C, r, max_iter)
    return Z, eta, total + it


def _polish(C, r, support, eta):
    """Newton on the optimality system over ``support``, in hull weights.

    Unknowns are the convex weights ``eta`` (``Z = sum eta_i c_i``) and the
    common squared ratio ``t``; equations are ``|Z - c_i|^2 / r_i^2 = t`` on the
    support plus ``sum eta = 1``.  Stationarity then holds by construction.
    """
    Cs = C[support]
    inv_r2 = 1.0 / r[support] ** 2
    k = len(support)
    Z = eta @ Cs
    t = float(np.max(np.sum((Cs - Z) ** 2, axis=1) * inv_r2))
    for _ in range(12):
        diff = Z - Cs
        F = np.append(np.sum(diff**2, axis=1) * inv_r2 - t, eta.sum() - 1.0)
        if np.max(np.abs(F)) <= 1e-15 * (1.0 + t):
            break
        J = np.zeros((k + 1, k + 1))
        J[:k, :k] = 2.0 * (diff * inv_r2[:, None]) @ Cs.T
        J[:k, k] = -1.0
        J[k, :k] = 1.0
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        eta = eta + step[:k]
        t += step[k]
        Z = eta @ Cs
    return Z, eta


def solve_minimax(balls: PairBalls, tol: float = 1e-12, max_iter: int = 200,
                  certify: bool = True, lambda_slack: float = LAMBDA_SLACK) -> MinimaxResult:
    """Minimise ``max_i |Z - c_i| / r_i`` over the pair balls.

    The optimisation itself is delegated to a conic interior-point solver and
    then refined by Newton steps on the active set; the returned ``lambda0``,
    certificate fields are all recomputed from ``z0`` directly.

    With ``certify`` set, a result with ``lambda0 > 1 + lambda_slack`` raises
    :class:`CertificateError`; values in ``(1, 1 + lambda_slack]`` only warn.
    """
    C, r = balls.centers, balls.radii
    if len(r) == 0:
        raise ValueError("empty ball family")
    if np.any(r < 0):
        raise ValueError("negative radius")

    zero = np.flatnonzero(r <= balls.r_zero_tol)
    if zero.size:
        # a degenerate ball pins the intersection to its centre
        i0 = int(zero[0])
        z0 = C[i0].copy()
        pos = r > balls.r_zero_tol
        lam = float(np.max(_ratios(C[pos], r[pos], z0))) if pos.any() else 0.0
        res = MinimaxResult(lam, z0, [i0], np.ones(1), 0, 0.0, singleton=True)
        if membership_margin(balls, z0) > max(tol, 1e-9) * (1.0 + float(np.max(r)) ** 2):
            raise CertificateError("degenerate ball centre lies outside the other balls", res)
        return _certified(res, certify, lambda_slack)

    if np.all(C == C[0]):
        m = len(r)
        res = MinimaxResult(0.0, C[0].copy(), list(range(m)), np.full(m, 1.0 / m), 0, 0.0)
        return _certified(res, certify, lambda_slack)

    Z, eta_all, iters = _cutting_plane(C, r, max_iter)
    best = _certificate(C, r, Z)
    if best[3] > tol:
        for thresh in (1e-6, 1e-3, 1e-9):
            support = np.flatnonzero(eta_all > thresh * eta_all.max())
            Zp, eta = _polish(C, r, support, eta_all[support] / eta_all[support].sum())
            if not np.all(np.isfinite(Zp)) or np.any(eta < -1e-12):
                continue
            cand = _certificate(C, r, Zp)
            if cand[0] <= best[0] * (1.0 + 1e-12) and cand[3] < best[3]:
                best = cand
            if best[3] <= tol:
                break

    lam, Z, active, residual, w = best
    res = MinimaxResult(lam, Z, [int(i) for i in active], w, iters, residual)
    return _certified(res, certify, lambda_slack)


class TightCertificateWarning(UserWarning):
    """lambda0 exceeded 1 by less than the accepted slack."""


def _certified(res: MinimaxResult, certify: bool, slack: float) -> MinimaxResult:
    if certify and res.lambda0 > 1.0:
        if res.lambda0 > 1.0 + slack:
            raise CertificateError(
                f"lambda0={res.lambda0:.12g} exceeds 1; the balls do not intersect", res)
        warnings.warn(f"lambda0={res.lambda0:.17g} slightly above 1 (accepted)",
                      TightCertificateWarning, stacklevel=3)
    return res
