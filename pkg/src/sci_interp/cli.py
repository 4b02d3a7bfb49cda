"""Command-line entry point: ``sci-interp {predict,fig1,fig2,rates,descent,islands}``.

Exit codes: 0 success, 2 user or input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import config_dict, load_config
from .core import HolderParams, LabeledDataset, WeightScheme, optimal_k
from .estimators import (
    HilbertEstimator,
    KnnEstimator,
    LagrangeEstimator,
    OneNNEstimator,
    ShepardEstimator,
    SimplexEstimator,
    WinnEstimator,
)
from .experiments import run_descent_cmd, run_fig1, run_fig2, run_islands, run_rates
from .io import InputError, csv_text, json_text, read_csv, write_atomic

EXIT_OK = 0
EXIT_USER = 2
EXIT_INTERNAL = 3

ESTIMATORS = ("winn", "knn", "1nn", "hilbert", "shepard", "simplex", "lagrange")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _threads(value) -> int:
    if value is None:
        value = os.environ.get("SCI_INTERP_THREADS", "1")
    try:
        n = int(value)
    except ValueError:
        raise InputError(f"invalid thread count {value!r}") from None
    if n < 0:
        raise InputError("thread count must be >= 0")
    return n or (os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON config (a previous output JSON also works)")
    common.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads, 0 = all cores (default: $SCI_INTERP_THREADS or 1)")

    parser = _Parser(prog="sci-interp", description="Interpolating estimators and their consistency experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("predict", parents=[common], help="fit on a training CSV and predict query rows")
    p.add_argument("train", help="CSV with columns x1..xd,y")
    p.add_argument("query", help="CSV with columns x1..xd (a y column is ignored)")
    p.add_argument("--estimator", choices=ESTIMATORS, default="winn")
    p.add_argument("--k", default="auto", help="neighbors for winn/knn, or 'auto'")
    p.add_argument("--delta", default="log", help="'log' or a positive power exponent (winn)")
    p.add_argument("--alpha", type=float, default=1.0, help="Hölder exponent used by k=auto")
    p.add_argument("--power", type=float, default=None, help="inverse-distance exponent (hilbert: default d, shepard: 2)")
    p.add_argument("--classify", action="store_true", help="threshold predictions at 1/2 (binary labels)")

    for name, text in (
        ("fig1", "wiNN regression curve through noisy 1-D samples"),
        ("fig2", "wiNN class regions for two Gaussians with flipped labels"),
        ("rates", "excess-risk decay and fitted log-log rate"),
        ("descent", "double-descent curve of min-norm least squares"),
        ("islands", "size of misclassification islands around flipped labels"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _build_estimator(args, ds: LabeledDataset):
    name = args.estimator
    if name in ("winn", "knn"):
        if args.k == "auto":
            k = optimal_k(len(ds), HolderParams(args.alpha, ds.dim))
        else:
            try:
                k = int(args.k)
            except ValueError:
                raise InputError(f"--k must be an integer or 'auto', got {args.k!r}") from None
        if name == "winn":
            return WinnEstimator(ds, k, WeightScheme.parse(args.delta))
        return KnnEstimator(ds, k)
    if name == "1nn":
        return OneNNEstimator(ds)
    if name == "hilbert":
        return HilbertEstimator(ds, args.power)
    if name == "shepard":
        return ShepardEstimator(ds, 2.0 if args.power is None else args.power)
    if name == "simplex":
        return SimplexEstimator(ds)
    return LagrangeEstimator(ds)


def cmd_predict(args) -> int:
    Xtr, ytr = read_csv(args.train, need_label=True)
    ds = LabeledDataset(Xtr, ytr)
    Xq, _ = read_csv(args.query, need_label=False, dim=ds.dim)
    cols = [f"x{i}" for i in range(1, ds.dim + 1)] + ["yhat"]
    if Xq is None:
        text = ""
    else:
        est = _build_estimator(args, ds)
        yhat = est.classify(Xq) if args.classify else est.predict(Xq)
        text = csv_text(cols, np.column_stack([Xq, yhat]).tolist() if len(Xq) else [])
    if args.out:
        write_atomic(Path(args.out) / "predictions.csv", text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


RUNNERS = {
    "fig1": lambda cfg, threads: run_fig1(cfg),
    "fig2": lambda cfg, threads: run_fig2(cfg),
    "rates": run_rates,
    "descent": run_descent_cmd,
    "islands": run_islands,
}


def cmd_experiment(args) -> int:
    cfg = load_config(args.command, args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 1 << 64:
            raise InputError("--seed must be an unsigned 64-bit integer")
        cfg.seed = args.seed
    results, files = RUNNERS[args.command](cfg, _threads(args.threads))
    out = Path(args.out or ".")
    for name, text in files.items():
        write_atomic(out / name, text)
    doc = {"config": config_dict(args.command, cfg), "results": results, "version": __version__}
    path = write_atomic(out / f"{args.command}.json", json_text(doc))
    print(path)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "predict":
            return cmd_predict(args)
        return cmd_experiment(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
