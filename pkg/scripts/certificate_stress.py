"""Distribution of the minimax certificate over random feasible instances at M = minimal_M.

    python scripts/certificate_stress.py --instances 2000 --dims 1 2 3 5 8
"""
from __future__ import annotations

import argparse
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from cw11 import membership_margin, minimal_cw11_constant, pair_balls, solve_minimax
from cw11.balls import TightCertificateWarning
from cw11.samplers import smooth_convex_jet


@dataclass
class Config:
    instances: int = 1000
    dims: list[int] = field(default_factory=lambda: [1, 2, 3, 5])
    max_points: int = 12
    seed: int = 0


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=Config.instances)
    p.add_argument("--dims", type=int, nargs="+", default=Config().dims)
    p.add_argument("--max_points", type=int, default=Config.max_points)
    p.add_argument("--seed", type=int, default=Config.seed)
    cfg = Config(**vars(p.parse_args()))

    rng = np.random.default_rng(cfg.seed)
    lam, res, marg, single = [], [], [], 0
    t0 = time.perf_counter()
    warnings.simplefilter("ignore", TightCertificateWarning)
    for _ in range(cfg.instances):
        d = int(rng.choice(cfg.dims))
        jet = smooth_convex_jet(int(rng.integers(2, cfg.max_points + 1)), d, rng)
        M = minimal_cw11_constant(jet).resolved_M()
        balls = pair_balls(jet, M, rng.uniform(-1.5, 1.5, d))
        r = solve_minimax(balls)
        lam.append(r.lambda0)
        res.append(r.residual)
        marg.append(membership_margin(balls, r.z0))
        single += r.singleton
    dt = time.perf_counter() - t0
    lam = np.array(lam)
    print(f"instances={cfg.instances} time={dt:.1f}s singleton branch={single}")
    print(f"lambda0: min={lam.min():.4f} median={np.median(lam):.4f} max={lam.max():.12f}")
    print(f"touching (lambda0 > 1 - 1e-9): {int(np.sum(lam > 1 - 1e-9))}")
    print(f"max KKT residual={max(res):.2e}  max membership margin={max(marg):.2e}")


if __name__ == "__main__":
    main()
