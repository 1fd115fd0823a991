"""Time the NN-chain engine on doubling problem sizes.

Prints key=value lines plus the time ratio between consecutive sizes; a
quadratic algorithm should show ratios near 4.

    python3 scripts/complexity_probe.py --method ward --sizes 500,1000,2000
"""
from dataclasses import dataclass

from _config import parse

from hclust.nn_chain import complexity_probe


@dataclass
class ProbeConfig:
    method: str = "ward"
    sizes: tuple = (500, 1000, 2000)
    dims: int = 2
    seed: int = 0
    repeats: int = 5


def run(cfg: ProbeConfig) -> list[dict]:
    report = complexity_probe(cfg.sizes, cfg.method, m=cfg.dims, seed=cfg.seed, repeats=cfg.repeats)
    prev = None
    for rec in report:
        ratio = "" if prev is None else f" ratio={rec['seconds'] / prev:.2f}"
        print(f"n={rec['n']} seconds={rec['seconds']:.5f} peak_live={rec['peak_live']}{ratio}")
        prev = rec["seconds"]
    return report


if __name__ == "__main__":
    run(parse(ProbeConfig, __doc__.splitlines()[0]))
