"""Cross-check every engine against the Lance-Williams reference on random data.

    python3 scripts/engine_equivalence.py --instances 100 --max-n 64
"""
from dataclasses import dataclass

import numpy as np
from _config import parse

from hclust import lance_williams as lw
from hclust import nn_chain as nc
from hclust import stored_data as sd
from hclust.dendrogram import canonical_equal, detect_inversions, max_cophenetic_deviation
from hclust.lance_williams import Method
from hclust.metrics import pairwise


@dataclass
class EquivalenceConfig:
    instances: int = 100
    min_n: int = 5
    max_n: int = 64
    max_dims: int = 5
    seed: int = 0
    tol: float = 1e-9


def engines_for(method: Method):
    out = []
    if method.reducible:
        out.append(("nn-chain", lambda X, D: nc.cluster_data(X, method)))
    if method.geometric:
        out.append(("stored-data", lambda X, D: sd.cluster(X, method)))
    return out


def run(cfg: EquivalenceConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    summary = {}
    for method in Method:
        worst, mismatches, inverted = 0.0, 0, 0
        for _ in range(cfg.instances):
            n = int(rng.integers(cfg.min_n, cfg.max_n + 1))
            X = rng.random((n, int(rng.integers(1, cfg.max_dims + 1))))
            D = pairwise(X, "squared_euclidean" if method.geometric else "euclidean")
            ref = lw.cluster(D, method)
            inverted += bool(detect_inversions(ref))
            for _, engine in engines_for(method):
                d = engine(X, D)
                mismatches += not canonical_equal(d, ref, cfg.tol)
                worst = max(worst, max_cophenetic_deviation(d, ref))
        names = ",".join(name for name, _ in engines_for(method))
        print(
            f"method={method.value} engines={names} instances={cfg.instances} "
            f"mismatches={mismatches} max_deviation={worst:.3e} reference_inversions={inverted}"
        )
        summary[method.value] = (mismatches, worst)
    return summary


if __name__ == "__main__":
    run(parse(EquivalenceConfig, __doc__.splitlines()[0]))
