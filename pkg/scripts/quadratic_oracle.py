"""Extend samples of q(x) = |x|^2/2 and measure how far the extension drifts from q.

Only consistency at M = 1 is guaranteed; the minimax gradient need not equal
the gradient of q unless the data force it (as in the 1-D two-point case).

    python scripts/quadratic_oracle.py --dim 5 --points 20 --queries 10
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from cw11 import cw11_gap, extend_many, legruyer_gamma, minimal_cw11_constant
from cw11.samplers import half_norm_sq_jet, uniform_ball_points


@dataclass
class Config:
    dim: int = 5
    points: int = 20
    queries: int = 10
    seed: int = 0


def run(cfg: Config) -> dict:
    rng = np.random.default_rng(cfg.seed)
    jet = half_norm_sq_jet(uniform_ball_points(cfg.points, cfg.dim, rng))
    rep = minimal_cw11_constant(jet)
    Q = uniform_ball_points(cfg.queries, cfg.dim, rng)
    t0 = time.perf_counter()
    tr = extend_many(jet, 1.0, Q)
    dt = time.perf_counter() - t0
    f_err = [abs(s.fx - 0.5 * s.x @ s.x) for s in tr.steps]
    g_err = [float(np.linalg.norm(s.gx - s.x)) for s in tr.steps]
    return {
        "minimal_M": rep.minimal_M,
        "gamma": legruyer_gamma(jet),
        "final_gap": cw11_gap(tr.jet, 1.0),
        "max_value_dev": max(f_err),
        "max_grad_dev": max(g_err),
        "max_lambda0": max(s.lambda0 for s in tr.steps),
        "seconds": dt,
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Config()).items():
        p.add_argument(f"--{name}", type=type(val), default=val)
    out = run(Config(**vars(p.parse_args())))
    for k, v in out.items():
        print(f"{k:>14}: {v:.6g}")


if __name__ == "__main__":
    main()
