"""Conditions on (points, unit outer normals) for C^{1,1} convex body interpolation.

Two quantities are computed from a finite set ``C`` with prescribed unit normals:

* ``delta_O  = min_y <N(y), y>`` (the origin sits strictly inside), and
* ``delta_KW = inf <N(y), y - x> / |N(y) - N(x)|^2`` over pairs with distinct normals.

Both must be positive; pairs with equal normals only need ``<N(y), y - x> >= 0``.
Only the check is provided here, not the body itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jet import REL_TOL

UNIT_TOL = 1e-12


class BodyDataError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BodyData:
    points: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        P = np.array(self.points, dtype=float, ndmin=2)
        N = np.array(self.normals, dtype=float, ndmin=2)
        if P.shape != N.shape or P.shape[0] == 0:
            raise BodyDataError(f"points {P.shape} and normals {N.shape} must match and be nonempty")
        if not (np.isfinite(P).all() and np.isfinite(N).all()):
            raise BodyDataError("non-finite body data")
        err = np.abs(np.linalg.norm(N, axis=1) - 1.0)
        if np.max(err) > UNIT_TOL:
            k = int(np.argmax(err))
            raise BodyDataError(f"normal {k} has norm {np.linalg.norm(N[k])!r}, expected 1")
        P.setflags(write=False)
        N.setflags(write=False)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "normals", N)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def transformed(self, Q: np.ndarray) -> "BodyData":
        """Apply the orthogonal map ``Q`` to points and normals alike."""
        return BodyData(self.points @ Q.T, self.normals @ Q.T)


@dataclass(frozen=True)
class BodyReport:
    delta_O: float
    delta_KW: float  # math.inf when every pair shares its normal
    feasible: bool
    worst_outer: int
    worst_kw: tuple[int, int] | None
    worst_parallel: tuple[int, int] | None  # equal-normal pair with the most negative slack
    parallel_slack: float  # math.inf when no equal-normal pair exists


def _tolerances(body: BodyData) -> tuple[float, float]:
    pmax = float(np.max(np.linalg.norm(body.points, axis=1)))
    return REL_TOL * (1.0 + pmax), REL_TOL


def check_outer(body: BodyData) -> float:
    return float(np.min(np.einsum("ik,ik->i", body.normals, body.points)))


def _kw_tables(body: BodyData):
    P, N = body.points, body.normals
    # S[y, x] = <N(y), y - x>, from explicit differences to avoid cancellation
    S = np.einsum("yk,yxk->yx", N, P[:, None, :] - P[None, :, :])
    dN2 = np.sum((N[:, None, :] - N[None, :, :]) ** 2, axis=-1)
    return S, dN2


def check_kw11(body: BodyData) -> float:
    """Largest ``delta`` in the normal-variation inequality; ``inf`` if no normals differ."""
    return _kw(body)[0]


def _kw(body: BodyData):
    n = len(body)
    S, dN2 = _kw_tables(body)
    _, ntol = _tolerances(body)
    off = ~np.eye(n, dtype=bool)
    distinct = off & (dN2 > ntol**2)
    parallel = off & ~distinct
    if distinct.any():
        ratio = np.where(distinct, S / np.where(distinct, dN2, 1.0), np.inf)
        y, x = np.unravel_index(int(np.argmin(ratio)), ratio.shape)
        delta, worst = float(ratio[y, x]), (int(y), int(x))
    else:
        delta, worst = math.inf, None
    if parallel.any():
        Sp = np.where(parallel, S, np.inf)
        y, x = np.unravel_index(int(np.argmin(Sp)), Sp.shape)
        pslack, pworst = float(Sp[y, x]), (int(y), int(x))
    else:
        pslack, pworst = math.inf, None
    return delta, worst, pslack, pworst


def check_body(body: BodyData) -> BodyReport:
    outer = np.einsum("ik,ik->i", body.normals, body.points)
    delta_O = float(np.min(outer))
    delta_KW, worst, pslack, pworst = _kw(body)
    ptol, _ = _tolerances(body)
    feasible = min(delta_O, delta_KW) > 0 and pslack >= -ptol
    return BodyReport(delta_O, delta_KW, bool(feasible), int(np.argmin(outer)),
                      worst, pworst, pslack)


def sphere_body(points) -> BodyData:
    """Points pushed to the unit sphere with normals ``N(y) = y``."""
    P = np.asarray(points, dtype=float)
    P = P / np.linalg.norm(P, axis=1, keepdims=True)
    return BodyData(P, P)


def circle_body(m: int, radius: float = 1.0) -> BodyData:
    t = 2.0 * np.pi * np.arange(m) / m
    U = np.stack([np.cos(t), np.sin(t)], axis=1)
    return BodyData(radius * U, U)
