"""1-jets on finite sets and the pairwise functionals computed from them.

A jet is a finite list of triples ``(x, f(x), G(x))``.  Everything here is an
``O(n^2)`` sweep over pairs of entries; there is no pruning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

REL_TOL = 1e-12


class JetError(ValueError):
    """Malformed jet data, e.g. mismatched shapes or duplicate points."""


class InfeasibleJetError(ValueError):
    """The jet does not satisfy the convex C^{1,1} condition at the requested M."""


@dataclass(frozen=True)
class JetEntry:
    x: np.ndarray
    f: float
    g: np.ndarray


@dataclass(frozen=True, eq=False)
class Jet:
    """Immutable finite 1-jet.

    ``points`` has shape ``(n, dim)``, ``values`` shape ``(n,)`` and
    ``grads`` shape ``(n, dim)``.  Points must be pairwise separated by more
    than :meth:`dedup_eps`.
    """

    points: np.ndarray
    values: np.ndarray
    grads: np.ndarray
    check_distinct: bool = field(default=True, repr=False)

    def __post_init__(self):
        X = np.array(self.points, dtype=float, ndmin=2)
        f = np.array(self.values, dtype=float, ndmin=1)
        G = np.array(self.grads, dtype=float, ndmin=2)
        if X.ndim != 2 or G.ndim != 2 or f.ndim != 1:
            raise JetError("points/grads must be 2-D and values 1-D")
        if X.shape[0] == 0:
            raise JetError("a jet needs at least one entry")
        if X.shape != G.shape or f.shape[0] != X.shape[0]:
            raise JetError(
                f"dimension mismatch: points {X.shape}, values {f.shape}, grads {G.shape}"
            )
        if not (np.isfinite(X).all() and np.isfinite(f).all() and np.isfinite(G).all()):
            raise JetError("non-finite entry in jet")
        for arr in (X, f, G):
            arr.setflags(write=False)
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "values", f)
        object.__setattr__(self, "grads", G)
        if self.check_distinct and len(f) > 1:
            i, j, dist = closest_pair(X)
            if dist <= self.dedup_eps():
                raise JetError(
                    f"entries {i} and {j} are closer than dedup_eps={self.dedup_eps():.3g}"
                )

    @classmethod
    def from_entries(cls, entries: Iterable[tuple]) -> "Jet":
        xs, fs, gs = [], [], []
        for x, fx, gx in entries:
            xs.append(np.atleast_1d(np.asarray(x, dtype=float)))
            fs.append(float(fx))
            gs.append(np.atleast_1d(np.asarray(gx, dtype=float)))
        if not xs:
            raise JetError("a jet needs at least one entry")
        dims = {len(v) for v in xs} | {len(v) for v in gs}
        if len(dims) != 1:
            raise JetError(f"dimension mismatch across entries: {sorted(dims)}")
        return cls(np.vstack(xs), np.array(fs), np.vstack(gs))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i: int) -> JetEntry:
        return JetEntry(self.points[i], float(self.values[i]), self.grads[i])

    @property
    def entries(self) -> list[JetEntry]:
        return [self[i] for i in range(len(self))]

    def dedup_eps(self) -> float:
        return REL_TOL * (1.0 + float(np.max(np.abs(self.points))))

    def scale(self) -> float:
        """Magnitude of function values, used to make gap tolerances relative."""
        gmax = float(np.max(np.linalg.norm(self.grads, axis=1)))
        xmax = float(np.max(np.linalg.norm(self.points, axis=1)))
        return 1.0 + float(np.max(np.abs(self.values))) + gmax * (1.0 + xmax)

    def locate(self, x, eps: float | None = None) -> int | None:
        """Index of the entry within ``eps`` of ``x``, or None."""
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(self.points - x, axis=1)
        i = int(np.argmin(d))
        if eps is None:
            eps = REL_TOL * (1.0 + max(float(np.max(np.abs(self.points))), float(np.max(np.abs(x)))))
        return i if d[i] <= eps else None

    def augmented(self, x, fx: float, gx) -> "Jet":
        X = np.vstack([self.points, np.asarray(x, dtype=float)[None, :]])
        f = np.append(self.values, float(fx))
        G = np.vstack([self.grads, np.asarray(gx, dtype=float)[None, :]])
        return Jet(X, f, G, check_distinct=False)

    def permuted(self, order: Sequence[int]) -> "Jet":
        order = np.asarray(order)
        return Jet(self.points[order], self.values[order], self.grads[order])


def closest_pair(X: np.ndarray) -> tuple[int, int, float]:
    D = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)
    np.fill_diagonal(D, np.inf)
    i, j = np.unravel_index(int(np.argmin(D)), D.shape)
    return int(min(i, j)), int(max(i, j)), float(D[i, j])


def bregman_matrix(jet: Jet) -> np.ndarray:
    """``D[i, j] = f(x_i) - f(x_j) - <G(x_j), x_i - x_j>`` for all ordered pairs."""
    X, f, G = jet.points, jet.values, jet.grads
    # <G_j, x_i - x_j> = <G_j, x_i> - <G_j, x_j>
    lin = X @ G.T - np.einsum("jk,jk->j", G, X)[None, :]
    return f[:, None] - f[None, :] - lin


def grad_diff_sq(jet: Jet) -> np.ndarray:
    G = jet.grads
    return np.sum((G[:, None, :] - G[None, :, :]) ** 2, axis=-1)


def point_dist_sq(jet: Jet) -> np.ndarray:
    X = jet.points
    return np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=-1)


def _off_diagonal(n: int) -> np.ndarray:
    return ~np.eye(n, dtype=bool)


def _require_pairs(jet: Jet):
    if len(jet) < 2:
        raise JetError("operation needs at least two jet entries")


def cw11_gap(jet: Jet, M: float) -> float:
    """Smallest slack of the convex C^{1,1} inequality over ordered pairs.

    The jet satisfies the condition with constant ``M`` iff the result is >= 0.
    """
    _require_pairs(jet)
    if not (M > 0 and math.isfinite(M)):
        raise ValueError(f"M must be positive and finite, got {M}")
    gap = bregman_matrix(jet) - grad_diff_sq(jet) / (2.0 * M)
    return float(np.min(gap[_off_diagonal(len(jet))]))


def gap_tolerances(jet: Jet) -> tuple[float, float]:
    """(abs_tol on Bregman gaps, grad_tol on gradient differences)."""
    fscale = 1.0 + float(np.max(np.abs(jet.values)))
    gnorm = np.linalg.norm(jet.grads, axis=1)
    xnorm = np.linalg.norm(jet.points, axis=1)
    # D mixes f with <G, x>, so its rounding error scales with both.
    abs_tol = REL_TOL * (fscale + float(np.max(gnorm)) * float(np.max(xnorm)))
    grad_tol = REL_TOL * (1.0 + float(np.max(gnorm)))
    return abs_tol, grad_tol


@dataclass(frozen=True)
class CwReport:
    feasible: bool
    minimal_M: float
    worst_pair: tuple[int, int] | None
    min_gap_at_M: float
    lip_G: float
    gamma: float

    def resolved_M(self, default: float = 1.0) -> float:
        """M to use downstream: minimal_M, or ``default`` for constant-gradient jets."""
        if not self.feasible:
            raise InfeasibleJetError("jet is not convex C^{1,1} for any M")
        return self.minimal_M if self.minimal_M > 0 else default


def minimal_cw11_constant(jet: Jet) -> CwReport:
    n = len(jet)
    if n == 1:
        return CwReport(True, 0.0, None, 0.0, 0.0, 0.0)
    D = bregman_matrix(jet)
    dG2 = grad_diff_sq(jet)
    abs_tol, grad_tol = gap_tolerances(jet)
    off = _off_diagonal(n)
    moving = off & (dG2 > grad_tol**2)

    bad = off & ((D < -abs_tol) | (moving & (D <= abs_tol)))
    lip = lip_gradient(jet)
    gamma = legruyer_gamma(jet)
    if bad.any():
        # report the most violated pair: most negative D, ties broken lexicographically
        Dm = np.where(bad, D, np.inf)
        i, j = np.unravel_index(int(np.argmin(Dm)), Dm.shape)
        return CwReport(False, math.inf, (int(i), int(j)), float(np.min(D[off])), lip, gamma)

    if not moving.any():
        return CwReport(True, 0.0, None, float(np.min(D[off])), lip, gamma)

    ratio = np.where(moving, dG2 / (2.0 * np.where(moving, D, 1.0)), -np.inf)
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    M = float(ratio[i, j])
    return CwReport(True, M, (int(i), int(j)), cw11_gap(jet, M), lip, gamma)


def lip_gradient(jet: Jet) -> float:
    """Largest difference quotient ``|G(x) - G(y)| / |x - y|``."""
    _require_pairs(jet)
    off = _off_diagonal(len(jet))
    q = np.sqrt(grad_diff_sq(jet)[off] / point_dist_sq(jet)[off])
    return float(np.max(q))


def legruyer_gamma(jet: Jet) -> float:
    """Le Gruyer's functional: sup over pairs of ``sqrt(A^2 + B^2) + |A|``."""
    if len(jet) < 2:
        return 0.0
    X, f, G = jet.points, jet.values, jet.grads
    iu, ju = np.triu_indices(len(jet), k=1)
    dx = X[ju] - X[iu]  # y - x with x = X[iu], y = X[ju]
    dist2 = np.sum(dx**2, axis=1)
    A = (2.0 * (f[iu] - f[ju]) + np.einsum("pk,pk->p", G[iu] + G[ju], dx)) / dist2
    B = np.linalg.norm(G[iu] - G[ju], axis=1) / np.sqrt(dist2)
    return float(np.max(np.hypot(A, B) + np.abs(A)))


def quadratic_growth_bound(jet: Jet) -> float:
    _require_pairs(jet)
    off = _off_diagonal(len(jet))
    return float(np.max(np.abs(bregman_matrix(jet))[off] / point_dist_sq(jet)[off]))
