"""Seeded search for small point sets on which centroid/median clustering inverts.

The first hit per method is printed as a literal that can be pasted into the
test suite as a frozen fixture.

    python3 scripts/find_inversion.py --seed 0 --points 3
"""
from dataclasses import dataclass

import numpy as np
from _config import parse

from hclust import detect_inversions, lance_williams
from hclust.metrics import pairwise


@dataclass
class SearchConfig:
    seed: int = 0
    points: int = 3
    tries: int = 10_000


def search(method: str, n_points: int, seed: int, tries: int):
    rng = np.random.default_rng(seed)
    for attempt in range(tries):
        # one decimal place keeps the fixture exact when pasted back
        X = np.round(rng.random((n_points, 2)), 1)
        if len({tuple(r) for r in X}) < n_points:
            continue
        d = lance_williams.cluster(pairwise(X, "squared_euclidean"), method)
        flagged = detect_inversions(d)
        if flagged:
            return attempt, X, d, flagged
    return None


def run(cfg: SearchConfig) -> None:
    for method in ("centroid", "median"):
        hit = search(method, cfg.points, cfg.seed, cfg.tries)
        if hit is None:
            print(f"{method}: no inversion in {cfg.tries} tries")
            continue
        attempt, X, d, flagged = hit
        print(f"{method}: attempt {attempt}, inverted merges {flagged}")
        print(f"  points = {X.tolist()}")
        for mg in d.merges:
            print(f"  merge {mg.left} + {mg.right} at {mg.height:.6g}")


if __name__ == "__main__":
    run(parse(SearchConfig, __doc__.splitlines()[0]))
