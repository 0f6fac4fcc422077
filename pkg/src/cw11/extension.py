"""Extending a feasible jet to new points one query at a time.

Each step picks the gradient at the query as the minimax center of the pair
balls, then picks the value inside the admissible bracket ``[s(x), I(x)]``.
The augmented jet satisfies the convex C^{1,1} condition with the same ``M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .balls import CertificateError, LAMBDA_SLACK, pair_balls, solve_minimax
from .jet import InfeasibleJetError, Jet, JetError, cw11_gap

BRACKET_TOL = 1e-9


class BracketInversionError(CertificateError):
    """``s(x) > I(x)`` at the selected gradient."""


class ExtensionError(RuntimeError):
    """Wraps a failure inside :func:`extend_many` with the offending query index."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"query {index}: {cause}")
        self.index = index
        self.cause = cause


@dataclass(frozen=True)
class ExtensionStep:
    x: np.ndarray
    gx: np.ndarray
    s: float
    i: float
    fx: float
    lambda0: float
    theta: float
    reused: bool = False  # query matched an existing entry


@dataclass(frozen=True)
class ExtensionTrace:
    steps: list[ExtensionStep]
    jet: Jet
    M: float
    order: list[int] = field(default_factory=list)


def bracket(jet: Jet, M: float, x, gx) -> tuple[float, float]:
    """Lower and upper ends ``(s, i)`` of the admissible values at ``x`` given ``gx``."""
    X, f, G = jet.points, jet.values, jet.grads
    x = np.asarray(x, dtype=float).reshape(-1)
    gx = np.asarray(gx, dtype=float).reshape(-1)
    q = np.sum((gx - G) ** 2, axis=1) / (2.0 * M)
    s = f + np.einsum("ik,ik->i", G, x - X) + q
    i = f - (X - x) @ gx - q
    return float(np.max(s)), float(np.min(i))


def bracket_tolerance(jet: Jet, M: float, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    spread = float(np.max(np.sum((jet.points - x) ** 2, axis=1)))
    return BRACKET_TOL * (jet.scale() + M * spread)


def extend_point(jet: Jet, M: float, x, theta: float = 0.5,
                 lambda_slack: float = LAMBDA_SLACK) -> ExtensionStep:
    """One induction step: gradient from the minimax, value from the bracket."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != jet.dim:
        raise JetError(f"query has dimension {x.shape[0]}, jet has {jet.dim}")
    hit = jet.locate(x)
    if hit is not None:
        fx = float(jet.values[hit])
        return ExtensionStep(jet.points[hit].copy(), jet.grads[hit].copy(), fx, fx, fx,
                             0.0, theta, reused=True)

    res = solve_minimax(pair_balls(jet, M, x), lambda_slack=lambda_slack)
    gx = res.z0
    s, i = bracket(jet, M, x, gx)
    if s > i + bracket_tolerance(jet, M, x):
        raise BracketInversionError(
            f"bracket inverted at lambda0={res.lambda0:.12g}: s={s!r} > I={i!r}", res)
    if s > i:
        # rounding-level inversion: collapse to the midpoint
        s = i = 0.5 * (s + i)
    return ExtensionStep(x, gx, s, i, s + theta * (i - s), res.lambda0, theta)


def canonical_order(queries: np.ndarray) -> list[int]:
    """Lexicographic order of the query coordinates (first coordinate most significant)."""
    if len(queries) == 0:
        return []
    return [int(k) for k in np.lexsort(queries.T[::-1])]


def extend_many(jet: Jet, M: float, queries, theta: float = 0.5,
                order: str = "given", check: bool = True) -> ExtensionTrace:
    """Sequentially extend ``jet`` to every query.

    Different orders can give different, equally valid extensions;
    ``order="canonical"`` sorts the queries lexicographically first.
    With ``check`` set the incoming jet is tested at ``M`` before any work.
    """
    Q = np.asarray(queries, dtype=float)
    if Q.ndim < 2:
        Q = Q.reshape(-1, jet.dim)
    if Q.shape[1] != jet.dim:
        raise JetError(f"queries have dimension {Q.shape[1]}, jet has {jet.dim}")
    if order == "given":
        idx = list(range(len(Q)))
    elif order == "canonical":
        idx = canonical_order(Q)
    else:
        raise ValueError(f"unknown order {order!r}")

    if check and len(jet) > 1:
        tol = 1e-12 * jet.scale()
        gap = cw11_gap(jet, M)
        if gap < -tol:
            raise InfeasibleJetError(f"jet is not convex C^{{1,1}} at M={M:g} (gap {gap:.3e})")

    steps = []
    cur = jet
    for k in idx:
        try:
            step = extend_point(cur, M, Q[k], theta)
        except (CertificateError, InfeasibleJetError, JetError) as exc:
            raise ExtensionError(k, exc) from exc
        steps.append(step)
        if not step.reused:
            cur = cur.augmented(step.x, step.fx, step.gx)
    return ExtensionTrace(steps, cur, M, idx)


def minimal_convex_extension(jet: Jet, x) -> float:
    """Largest tangent-plane value at ``x``: ``max_a f(a) + <G(a), x - a>``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    return float(np.max(jet.values + np.einsum("ik,ik->i", jet.grads, x - jet.points)))
