"""Tangent-plane growth and the unit-ball bound for the l2 counterexample.

    python scripts/counterexample_sweep.py --r 3 --k 10 20 40 80 --samples 10000
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from cw11 import counterexample as cx


@dataclass
class Config:
    r: float = 3.0
    k: list[int] = field(default_factory=lambda: [10, 20, 40, 80])
    dim: int = 50
    samples: int = 10_000
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--r", type=float, default=Config.r)
    p.add_argument("--k", type=int, nargs="+", default=Config().k)
    p.add_argument("--dim", type=int, default=Config.dim)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    cfg = Config(**vars(p.parse_args()))

    print(f"{'k':>5} {'K':>5} {'tangent':>14} {'k(r-2)':>10} {'|direct-closed|':>16}")
    for rep in cx.mc_divergence_sweep(cfg.r, cfg.k):
        gap = abs(rep.tangent_direct - rep.tangent_closed_form)
        print(f"{rep.k:>5} {rep.K:>5} {rep.tangent_direct:>14.6f} {rep.lower_bound:>10.3f} {gap:>16.1e}")
    m = cx.ball_bound_scan(cfg.dim, cfg.dim, cfg.samples, cfg.seed)
    print(f"max f over {cfg.samples} unit-ball samples (d={cfg.dim}): {m:.6f}  bound 49/24 = {cx.BALL_BOUND:.6f}")
    for name, (t, v) in cx.auxiliary_maxima().items():
        print(f"auxiliary {name}: argmax t={t:.8f}, max={v:.12f}")


if __name__ == "__main__":
    main()
