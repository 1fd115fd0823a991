"""Batch command-line front end.

    hclust run data.csv --method ward --engine auto --merges - --newick tree.nwk
    hclust run values.csv --engine baire --levels 1,2,3
    hclust compare data.csv --method ward --engine-a oracle --engine-b nn-chain
    hclust probe --method ward --sizes 500,1000,2000 --seed 0

Exit codes: 0 success, 2 configuration error, 3 data error, 4 engine and
method incompatible, 5 I/O error.
"""
from __future__ import annotations

import argparse
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import baire, dendrogram, ingest, lance_williams, nn_chain, stored_data
from .dendrogram import Dendrogram, Partition
from .errors import ConfigError, DataError, IncompatibleMethodError
from .lance_williams import Method
from .metrics import METRICS, pairwise

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INCOMPATIBLE = 4
EXIT_IO = 5

ENGINES = ("auto", "oracle", "stored-data", "nn-chain", "baire")


@dataclass
class RunConfig:
    input: Path
    method: str = "ward"
    engine: str = "auto"
    metric: str = "auto"
    p: float = 2.0
    normalize: str = "none"
    delimiter: str = ","
    header: bool = True
    label_column: str | None = None
    weight_column: str | None = None
    columns: tuple[str, ...] | None = None
    base: int = baire.DEFAULT_BASE
    precision: int = baire.DEFAULT_PRECISION
    attribute: str | None = None
    interleave: bool = False
    baire_normalize: str = "auto"
    levels: tuple[int, ...] = ()
    merges: str | None = None
    newick: str | None = None
    cut_k: int | None = None
    cut_height: float | None = None
    partition: str | None = None
    keys: str | None = None
    timing: bool = False

    def validate(self) -> Method:
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}; expected one of {ENGINES}")
        try:
            method = Method.parse(self.method)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.metric != "auto" and self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}")
        if self.normalize not in ingest.NORMALIZATIONS:
            raise ConfigError(f"unknown normalisation {self.normalize!r}")
        if self.cut_k is not None and self.cut_height is not None:
            raise ConfigError("give at most one of --cut-k and --cut-height")
        if self.engine == "baire":
            if self.base < 2 or self.precision < 1:
                raise ConfigError("baire needs --base >= 2 and --precision >= 1")
            if self.interleave and self.attribute is not None:
                raise ConfigError("--attribute and --interleave are mutually exclusive")
        if self.engine == "nn-chain" and not method.reducible:
            raise IncompatibleMethodError(
                f"engine nn-chain cannot run {method.value}: the criterion is not reducible "
                "and may produce inversions; use --engine stored-data or --engine oracle"
            )
        if self.engine == "stored-data" and not method.geometric:
            raise IncompatibleMethodError(
                f"engine stored-data needs a cluster-centre criterion (median, centroid, "
                f"ward), not {method.value}; use --engine oracle or --engine nn-chain"
            )
        if method.geometric and self.metric not in ("auto", "squared_euclidean"):
            if self.engine != "baire":
                raise IncompatibleMethodError(
                    f"{method.value} is defined on squared Euclidean distances; "
                    f"--metric {self.metric} is not allowed"
                )
        return method


@dataclass
class RunResult:
    engine: str
    method: Method
    data: ingest.DataMatrix
    dendrogram: Dendrogram | None = None
    tree: baire.BaireTree | None = None
    partition: Partition | None = None
    timing: dict = field(default_factory=dict)


def _load(config: RunConfig) -> ingest.DataMatrix:
    X = ingest.load_csv(
        config.input,
        delimiter=config.delimiter,
        header=config.header,
        label_column=config.label_column,
        weight_column=config.weight_column,
        columns=list(config.columns) if config.columns else None,
    )
    return ingest.normalize(X, config.normalize)


def _resolve_engine(config: RunConfig, method: Method) -> str:
    if config.engine != "auto":
        return config.engine
    return "nn-chain" if method.reducible else "stored-data"


def _metric(config: RunConfig, method: Method) -> str:
    if config.metric != "auto":
        return config.metric
    return "squared_euclidean" if method.geometric else "euclidean"


def cluster(config: RunConfig, X: ingest.DataMatrix, method: Method, engine: str) -> Dendrogram:
    metric = _metric(config, method)
    if engine == "oracle":
        D = pairwise(X.values, metric, config.p)
        return lance_williams.cluster(D, method, X.weights, X.labels)
    if engine == "stored-data":
        return stored_data.cluster(X.values, method, X.weights, X.labels)
    if engine == "nn-chain":
        if method is Method.WARD:
            return nn_chain.cluster_data(X.values, method, X.weights, X.labels)
        D = pairwise(X.values, metric, config.p)
        return nn_chain.cluster(D, method, X.weights, X.labels)
    raise ConfigError(f"engine {engine!r} does not produce a dendrogram")


def _baire_tree(config: RunConfig, X: ingest.DataMatrix) -> baire.BaireTree:
    attribute = None
    if config.attribute is not None:
        if config.attribute in X.columns:
            attribute = X.columns.index(config.attribute)
        elif config.attribute.isdigit() and int(config.attribute) < X.m:
            attribute = int(config.attribute)
        else:
            raise ConfigError(f"unknown attribute {config.attribute!r}")
    elif X.m == 1:
        attribute = 0
    elif not config.interleave:
        raise ConfigError("baire clusters one attribute: give --attribute or --interleave")
    return baire.build(
        X.values,
        config.base,
        config.precision,
        normalize=config.baire_normalize,
        ids=X.labels,
        attribute=attribute,
        interleave=config.interleave,
    )


def _emit(target: str | None, text: str) -> None:
    if target is None:
        return
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _partition_tsv(labels: Sequence[str], part: Partition) -> str:
    lines = ["label\tcluster"] + [f"{x}\t{c}" for x, c in zip(labels, part.labels)]
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> RunResult:
    """Execute one clustering run and write the requested outputs."""
    method = config.validate()
    engine = _resolve_engine(config, method)
    t0 = time.perf_counter()
    X = _load(config)
    t1 = time.perf_counter()
    result = RunResult(engine, method, X)

    if engine == "baire":
        tree = _baire_tree(config, X)
        result.tree = tree
        levels = config.levels or tuple(range(1, tree.precision + 1))
        bad = [k for k in levels if not 1 <= k <= tree.precision]
        if bad:
            raise ConfigError(f"levels {bad} outside [1, {tree.precision}]")
        t2 = time.perf_counter()
        _emit(config.partition or "-", baire.partitions_to_tsv(tree, levels))
        _emit(config.keys, baire.keys_to_tsv(tree))
    else:
        if X.n < 2:
            raise DataError("need at least 2 objects to cluster")
        d = cluster(config, X, method, engine)
        t2 = time.perf_counter()
        result.dendrogram = d
        if config.cut_k is not None or config.cut_height is not None:
            try:
                result.partition = dendrogram.cut(d, k=config.cut_k, height=config.cut_height)
            except ValueError as exc:
                if isinstance(exc, DataError):
                    raise
                raise ConfigError(str(exc)) from None
        merges = config.merges
        if merges is None and config.newick is None and config.partition is None:
            merges = "-"
        _emit(merges, dendrogram.merges_to_tsv(d))
        _emit(config.newick, dendrogram.to_newick(d) + "\n" if config.newick else "")
        if result.partition is not None:
            _emit(config.partition or "-", _partition_tsv(X.labels, result.partition))

    result.timing = {
        "engine": engine,
        "method": "none" if engine == "baire" else method.value,
        "n": X.n,
        "m": X.m,
        "load_seconds": t1 - t0,
        "cluster_seconds": t2 - t1,
    }
    if config.timing:
        for key, value in result.timing.items():
            sys.stderr.write(f"{key}={value}\n")
    return result


@dataclass
class CompareReport:
    equal: bool
    max_cophenetic_deviation: float
    engine_a: str
    engine_b: str

    def lines(self) -> str:
        return (
            f"engine_a={self.engine_a}\nengine_b={self.engine_b}\n"
            f"equal={str(self.equal).lower()}\n"
            f"max_cophenetic_deviation={self.max_cophenetic_deviation:.6e}\n"
        )


def compare(a: RunConfig, b: RunConfig, tol: float = 1e-9) -> CompareReport:
    """Run two configurations on one input and compare their hierarchies."""
    if Path(a.input) != Path(b.input):
        raise ConfigError("compared runs must read the same input")
    results = []
    for config in (a, b):
        method = config.validate()
        engine = _resolve_engine(config, method)
        if engine == "baire":
            raise IncompatibleMethodError("baire runs produce no dendrogram to compare")
        X = _load(config)
        results.append((engine, cluster(config, X, method, engine)))
    (ea, da), (eb, db) = results
    return CompareReport(
        dendrogram.canonical_equal(da, db, tol),
        dendrogram.max_cophenetic_deviation(da, db),
        ea,
        eb,
    )


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in _csv_list(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", type=Path, help="CSV file, one object per row")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--label-column")
    p.add_argument("--weight-column")
    p.add_argument("--columns", type=_csv_list, help="comma-separated attribute columns")
    p.add_argument("--normalize", default="none", choices=ingest.NORMALIZATIONS)
    p.add_argument("--metric", default="auto", choices=("auto",) + METRICS)
    p.add_argument("--p", type=float, default=2.0, help="Minkowski order")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hclust", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="cluster one input file")
    _add_input(r)
    r.add_argument("--method", default="ward")
    r.add_argument("--engine", default="auto", choices=ENGINES)
    r.add_argument("--base", type=int, default=baire.DEFAULT_BASE)
    r.add_argument("--precision", type=int, default=baire.DEFAULT_PRECISION)
    r.add_argument("--attribute")
    r.add_argument("--interleave", action="store_true")
    r.add_argument("--baire-normalize", default="auto", choices=("auto", "minmax", "none"))
    r.add_argument("--levels", type=_int_list, default=())
    r.add_argument("--merges", metavar="PATH", help="merge TSV ('-' for stdout)")
    r.add_argument("--newick", metavar="PATH")
    r.add_argument("--cut-k", type=int)
    r.add_argument("--cut-height", type=float)
    r.add_argument("--partition", metavar="PATH", help="cut or level partition TSV")
    r.add_argument("--keys", metavar="PATH", help="baire key dump TSV")
    r.add_argument("--timing", action="store_true", help="key=value timings on stderr")

    c = sub.add_parser("compare", help="check two engines/methods for the same hierarchy")
    _add_input(c)
    c.add_argument("--method", default="ward")
    c.add_argument("--method-a")
    c.add_argument("--method-b")
    c.add_argument("--engine-a", default="oracle", choices=ENGINES)
    c.add_argument("--engine-b", default="nn-chain", choices=ENGINES)
    c.add_argument("--tol", type=float, default=1e-9)

    pr = sub.add_parser("probe", help="time NN-chain runs on synthetic data")
    pr.add_argument("--method", default="ward")
    pr.add_argument("--sizes", type=_int_list, default=(500, 1000, 2000))
    pr.add_argument("--dims", type=int, default=2)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--repeats", type=int, default=3)
    return parser


def _config(ns: argparse.Namespace, **overrides) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    values = {k: v for k, v in vars(ns).items() if k in fields}
    values.update(overrides)
    return RunConfig(**values)


def _dispatch(ns: argparse.Namespace) -> int:
    if ns.command == "run":
        run(_config(ns))
    elif ns.command == "compare":
        a = _config(ns, method=ns.method_a or ns.method, engine=ns.engine_a)
        b = _config(ns, method=ns.method_b or ns.method, engine=ns.engine_b)
        sys.stdout.write(compare(a, b, ns.tol).lines())
    elif ns.command == "probe":
        try:
            method = Method.parse(ns.method)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for rec in nn_chain.complexity_probe(
            ns.sizes, method, m=ns.dims, seed=ns.seed, repeats=ns.repeats
        ):
            sys.stdout.write(
                f"method={method.value} n={rec['n']} seconds={rec['seconds']:.6f} "
                f"peak_live={rec['peak_live']}\n"
            )
    return EXIT_OK


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"hclust: warning: {message}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.showwarning = _show_warning
            return _dispatch(ns)
    except IncompatibleMethodError as exc:
        print(f"hclust: incompatible: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except ConfigError as exc:
        print(f"hclust: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"hclust: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"hclust: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
