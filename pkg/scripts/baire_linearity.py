"""Baire tree build time against n, to check linear growth.

    python3 scripts/baire_linearity.py --sizes 10000,100000,1000000
"""
import time
from dataclasses import dataclass

import numpy as np
from _config import parse

from hclust import baire


@dataclass
class LinearityConfig:
    sizes: tuple = (10_000, 100_000, 1_000_000)
    base: int = 10
    precision: int = 8
    seed: int = 0
    repeats: int = 5


def best_build(values, m, K, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        tree = baire.build(values, m, K)
        best = min(best, time.perf_counter() - start)
    return best, tree


def run(cfg: LinearityConfig) -> list[float]:
    rng = np.random.default_rng(cfg.seed)
    prev = None
    timings = []
    for n in cfg.sizes:
        seconds, tree = best_build(rng.random(n), cfg.base, cfg.precision, cfg.repeats)
        cells = tree.n_nodes(tree.precision)
        ratio = "" if prev is None else f" ratio={seconds / prev:.2f}"
        print(f"n={n} seconds={seconds:.5f} cells={cells} digit_ops={tree.digit_ops}{ratio}")
        prev = seconds
        timings.append(seconds)
    return timings


if __name__ == "__main__":
    run(parse(LinearityConfig, __doc__.splitlines()[0]))
