"""Extend a small jet over a 1-D or 2-D grid and write plot-ready CSV.

    python scripts/extension_grid.py --dim 1 --n 41 --out grid1d.csv
    python scripts/extension_grid.py --dim 2 --n 15 --theta 0.0 --out grid2d.csv

Data come from ``logsumexp`` plus a random quadratic (see
``cw11.samplers.smooth_convex_jet``); grid points are processed in canonical order.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from cw11 import cw11_gap, extend_many, minimal_cw11_constant
from cw11.jetio import points_csv
from cw11.samplers import smooth_convex_jet


@dataclass
class Config:
    dim: int = 1
    points: int = 5
    n: int = 41
    lo: float = -1.5
    hi: float = 1.5
    theta: float = 0.5
    seed: int = 0
    out: str = "-"


def grid(cfg: Config) -> np.ndarray:
    axis = np.linspace(cfg.lo, cfg.hi, cfg.n)
    mesh = np.meshgrid(*[axis] * cfg.dim, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def run(cfg: Config) -> str:
    if cfg.dim not in (1, 2):
        raise SystemExit("dim must be 1 or 2")
    jet = smooth_convex_jet(cfg.points, cfg.dim, np.random.default_rng(cfg.seed))
    M = minimal_cw11_constant(jet).resolved_M()
    tr = extend_many(jet, M, grid(cfg), theta=cfg.theta, order="canonical")
    print(f"M={M:.6g} entries={len(tr.jet)} final gap={cw11_gap(tr.jet, M):.3e}", file=sys.stderr)
    X = np.array([s.x for s in tr.steps])
    G = np.array([s.gx for s in tr.steps])
    return points_csv(X, [s.fx for s in tr.steps], G)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, val in vars(Config()).items():
        p.add_argument(f"--{name}", type=type(val), default=val)
    cfg = Config(**vars(p.parse_args()))
    text = run(cfg)
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
