"""Coherent lower bound against the sup-norm of the perturbation on random octahedra.

    python3 scripts/stability_batch.py --pairs 20 --grid 32 --words 2
"""

import argparse
import logging
import time

import numpy as np

from cohmatch.coherent import CoherentConfig, estimate_cdmatch
from cohmatch.fixtures import perturbation_pair


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=20)
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--grid", type=int, default=32)
    ap.add_argument("--words", type=int, default=2)
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)
    cfg = CoherentConfig(resolution=args.grid, word_length=args.words)
    print("seed  norm       lower      ratio   seconds")
    worst = 0.0
    for seed in range(args.pairs):
        t0 = time.perf_counter()
        K, f, g = perturbation_pair(seed, eps=args.eps)
        norm = float(np.max(np.abs(g.values - f.values)))
        est = estimate_cdmatch(K, f, g, config=cfg)
        worst = max(worst, est.lower / norm)
        print(f"{seed:4d}  {norm:.6f}   {est.lower:.6f}   {est.lower / norm:.3f}   {time.perf_counter() - t0:.1f}")
    print(f"max lower/norm = {worst:.6f}")


if __name__ == "__main__":
    main()
