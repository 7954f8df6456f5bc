"""Command-line frontend: train, predict, evaluate, benchmark, generate data.

All results go to standard output as JSON; diagnostics go to standard error.
Every command is deterministic given --seed (timings excluded), and --threads
never changes computed values, only wall-clock time.

Exit codes: 0 ok, 2 bad arguments, 3 data errors, 4 I/O or model-file errors.

Usage:
    # Generate a labeled two-moons CSV
    frocc synth --gen moons --n 2000 --noise 0.1 --seed 7 --out moons.csv

    # Train on the positive rows only
    frocc train --train moons.csv --label-column label --positive-label 1 \
        --model moons_model.json -m 100 --epsilon 0.1 --kernel rbf --seed 7

    # Evaluate against the labels
    frocc eval --test moons.csv --label-column label --positive-label 1 \
        --model moons_model.json

    # Score new points
    frocc predict --test points.csv --model moons_model.json

    # Benchmark train/test time (5 repetitions)
    frocc bench --gen gaussians --modes 4 --dim 10 --n 100000 --seed 1 \
        -m 100 --epsilon 1.0
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from frocc.core import Kernel
from frocc.data import (
    Dataset,
    fit_standardizer,
    gen_gaussian_mixture,
    gen_two_moons,
    load_csv,
    sample_uniform_box,
    save_csv,
)
from frocc.errors import ConfigError, DataError, ModelFileError
from frocc.metrics import evaluate
from frocc.model import FroccModel, _serialize_body, fit, load

logger = logging.getLogger(__name__)

KERNEL_NAMES = ("linear", "rbf", "poly", "sigmoid")


@dataclass
class RunConfig:
    """Validated command configuration (mirrors the CLI flags)."""

    command: str
    train: str | None = None
    test: str | None = None
    model: str | None = None
    out: str | None = None
    m: int = 100
    epsilon: float = 0.1
    kernel: Kernel = Kernel.linear()
    seed: int = 0
    mode: str = "exact"
    threads: int = 1
    standardize: bool = False
    label_column: str | None = None
    positive_label: str | None = None
    at_n: int | None = None
    gen: str | None = None
    n: int = 1000
    noise: float = 0.1
    modes: int = 4
    dim: int = 2
    spread: float = 1.0
    n_neg: int = 0
    repeats: int = 5

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        kernel = Kernel(
            variant=getattr(args, "kernel", "linear"),
            gamma=getattr(args, "gamma", None),
            degree=getattr(args, "degree", None),
            coef0=getattr(args, "coef0", None),
        )
        threads_raw = getattr(args, "threads", "1")
        if threads_raw == "auto":
            threads = os.cpu_count() or 1
        else:
            try:
                threads = int(threads_raw)
            except ValueError:
                raise ConfigError(f"--threads must be an integer or 'auto', got {threads_raw!r}")
        if threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {threads}")

        cfg = cls(
            command=args.command,
            train=getattr(args, "train", None),
            test=getattr(args, "test", None),
            model=getattr(args, "model", None),
            out=getattr(args, "out", None),
            m=getattr(args, "m", 100),
            epsilon=getattr(args, "epsilon", 0.1),
            kernel=kernel,
            seed=getattr(args, "seed", 0),
            mode={"exact": "exact", "bin": "binned"}[getattr(args, "mode", "exact")],
            threads=threads,
            standardize=getattr(args, "standardize", False),
            label_column=getattr(args, "label_column", None),
            positive_label=getattr(args, "positive_label", None),
            at_n=getattr(args, "at_n", None),
            gen=getattr(args, "gen", None),
            n=getattr(args, "n", 1000),
            noise=getattr(args, "noise", 0.1),
            modes=getattr(args, "modes", 4),
            dim=getattr(args, "dim", 2),
            spread=getattr(args, "spread", 1.0),
            n_neg=getattr(args, "n_neg", 0),
            repeats=getattr(args, "repeats", 5),
        )
        if cfg.m < 1:
            raise ConfigError(f"-m must be >= 1, got {cfg.m}")
        if not 0.0 < cfg.epsilon <= 1.0:
            raise ConfigError(f"--epsilon must be in (0, 1], got {cfg.epsilon}")
        if not 0 <= cfg.seed < 2**64:
            raise ConfigError(f"--seed must be in [0, 2**64), got {cfg.seed}")
        # Input paths are checked before any work starts.
        for path in (cfg.train, cfg.test) + ((cfg.model,) if cfg.command in ("predict", "eval") else ()):
            if path is not None and not os.path.isfile(path):
                raise FileNotFoundError(f"input path not found: {path}")
        return cfg


def _emit(obj: dict, out_path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True)
    print(text)
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _load_features(cfg: RunConfig, path: str) -> Dataset:
    return load_csv(
        path,
        label_column=cfg.label_column,
        has_header=_has_header(path),
        positive_label=cfg.positive_label,
    )


def _has_header(path: str) -> bool:
    # A file whose first row contains a non-numeric cell is assumed headed.
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline()
    for cell in first.strip().split(","):
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _train_points(cfg: RunConfig) -> np.ndarray:
    ds = _load_features(cfg, cfg.train)
    if ds.labels is not None:
        keep = np.flatnonzero(ds.labels)
        if keep.size == 0:
            raise DataError("no rows match the positive label; nothing to train on")
        logger.info("training on %d of %d rows matching positive label", keep.size, ds.n)
        return ds.points[keep]
    return ds.points


def cmd_train(cfg: RunConfig) -> int:
    X = _train_points(cfg)
    standardizer = fit_standardizer(X) if cfg.standardize else None
    t0 = time.perf_counter()
    model = fit(
        X, m=cfg.m, epsilon=cfg.epsilon, kernel=cfg.kernel, seed=cfg.seed,
        mode=cfg.mode, n_jobs=cfg.threads, standardizer=standardizer,
    )
    train_seconds = time.perf_counter() - t0
    model.save(cfg.model)
    size = model.model_size()
    _emit(
        {
            "command": "train",
            "model_path": cfg.model,
            "train_seconds": train_seconds,
            "model_size": size.total,
            "model_size_approximate": size.approximate,
            "n": int(X.shape[0]),
            "d": int(X.shape[1]),
            "m": cfg.m,
            "epsilon": cfg.epsilon,
            "kernel": cfg.kernel.variant,
            "mode": cfg.mode,
            "seed": cfg.seed,
        },
        cfg.out,
    )
    return 0


def cmd_predict(cfg: RunConfig) -> int:
    model = load(cfg.model)
    ds = _load_features(cfg, cfg.test)
    scores = model.decision_score(ds.points)
    yes = model.predict(ds.points)
    _emit(
        {
            "command": "predict",
            "n": ds.n,
            "scores": [float(s) for s in np.atleast_1d(scores)],
            "yes": [bool(v) for v in np.atleast_1d(yes)],
        },
        cfg.out,
    )
    return 0


def cmd_eval(cfg: RunConfig) -> int:
    if cfg.label_column is None or cfg.positive_label is None:
        raise ConfigError("eval requires --label-column and --positive-label")
    model = load(cfg.model)
    test = _load_features(cfg, cfg.test)
    report = evaluate(model, test, n=cfg.at_n)
    _emit({"command": "eval", "model_path": cfg.model, **report.to_dict()}, cfg.out)
    return 0


def _generate(cfg: RunConfig) -> Dataset:
    if cfg.gen == "moons":
        return gen_two_moons(cfg.n, cfg.noise, cfg.seed)
    if cfg.gen == "gaussians":
        ds = gen_gaussian_mixture(cfg.modes, cfg.dim, cfg.n, cfg.spread, cfg.seed)
        labels = np.ones(ds.n, dtype=bool)
        points = ds.points
        if cfg.n_neg > 0:
            neg = sample_uniform_box(
                cfg.n_neg, points.min(axis=0), points.max(axis=0), cfg.seed + 1
            )
            points = np.vstack([points, neg])
            labels = np.concatenate([labels, np.zeros(cfg.n_neg, dtype=bool)])
        return Dataset(points=points, labels=labels, name=ds.name)
    raise ConfigError(f"--gen must be 'gaussians' or 'moons', got {cfg.gen!r}")


def cmd_synth(cfg: RunConfig) -> int:
    ds = _generate(cfg)
    save_csv(cfg.out, ds)
    n_pos = int(np.count_nonzero(ds.labels)) if ds.labels is not None else ds.n
    _emit(
        {
            "command": "synth",
            "out": cfg.out,
            "generator": cfg.gen,
            "n": ds.n,
            "d": ds.d,
            "positives": n_pos,
            "negatives": ds.n - n_pos,
            "seed": cfg.seed,
        },
        None,
    )
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    if cfg.gen is not None:
        ds = _generate(cfg)
        X = ds.points
        source = ds.name
    elif cfg.train is not None:
        X = _train_points(cfg)
        source = cfg.train
    else:
        raise ConfigError("bench requires --train or --gen")

    standardizer = fit_standardizer(X) if cfg.standardize else None
    train_runs: list[float] = []
    test_runs: list[float] = []
    model: FroccModel | None = None
    for rep in range(cfg.repeats):
        t0 = time.perf_counter()
        model = fit(
            X, m=cfg.m, epsilon=cfg.epsilon, kernel=cfg.kernel, seed=cfg.seed,
            mode=cfg.mode, n_jobs=cfg.threads, standardizer=standardizer,
        )
        train_runs.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        model.decision_score(X)
        test_runs.append(time.perf_counter() - t0)
        logger.info("bench rep %d: train %.3fs test %.3fs", rep, train_runs[-1], test_runs[-1])

    model_sha = hashlib.sha256(_serialize_body(model).encode("ascii")).hexdigest()
    _emit(
        {
            "command": "bench",
            "source": source,
            "repetitions": cfg.repeats,
            "n": int(X.shape[0]),
            "d": int(X.shape[1]),
            "m": cfg.m,
            "epsilon": cfg.epsilon,
            "kernel": cfg.kernel.variant,
            "mode": cfg.mode,
            "threads": cfg.threads,
            "train_seconds_mean": float(np.mean(train_runs)),
            "train_seconds_std": float(np.std(train_runs, ddof=1)) if cfg.repeats > 1 else 0.0,
            "test_seconds_mean": float(np.mean(test_runs)),
            "test_seconds_std": float(np.std(test_runs, ddof=1)) if cfg.repeats > 1 else 0.0,
            "train_seconds_runs": train_runs,
            "test_seconds_runs": test_runs,
            "model_sha256": model_sha,
        },
        cfg.out,
    )
    return 0


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "synth": cmd_synth,
}


def _add_model_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("-m", dest="m", type=int, default=100, help="number of classifying directions")
    p.add_argument("--epsilon", type=float, default=0.1, help="separation parameter in (0, 1]")
    p.add_argument("--kernel", choices=KERNEL_NAMES, default="linear")
    p.add_argument("--gamma", type=float, default=None, help="rbf/sigmoid gamma (default 1/d)")
    p.add_argument("--coef0", type=float, default=None, help="poly/sigmoid offset (default 0)")
    p.add_argument("--degree", type=int, default=None, help="poly degree (default 3)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("exact", "bin"), default="exact")
    p.add_argument("--threads", default="1", help="worker threads, integer or 'auto'")
    p.add_argument("--standardize", action="store_true",
                   help="standardize features using training statistics")


def _add_label_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--label-column", default=None, help="label column name or index")
    p.add_argument("--positive-label", default=None, help="cell value of the positive class")


def _add_generator_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gen", choices=("gaussians", "moons"), default=None)
    p.add_argument("--n", type=int, default=1000, help="number of points")
    p.add_argument("--noise", type=float, default=0.1, help="moons noise stdev")
    p.add_argument("--modes", type=int, default=4, help="gaussian mixture components")
    p.add_argument("--dim", type=int, default=2, help="gaussian mixture dimension")
    p.add_argument("--spread", type=float, default=1.0, help="gaussian component stdev")
    p.add_argument("--n-neg", type=int, default=0,
                   help="append this many uniform bounding-box negatives (gaussians)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frocc",
        description="Random-projection one-class classifier: train, score, evaluate, benchmark.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on a CSV of training points")
    p.add_argument("--train", required=True, help="training CSV path")
    p.add_argument("--model", required=True, help="output model path")
    p.add_argument("--out", default=None, help="also write the JSON summary here")
    _add_model_params(p)
    _add_label_params(p)

    p = sub.add_parser("predict", help="score points with a trained model")
    p.add_argument("--test", required=True, help="input CSV path")
    p.add_argument("--model", required=True, help="model path")
    p.add_argument("--out", default=None)
    _add_label_params(p)

    p = sub.add_parser("eval", help="evaluate a model on a labeled CSV")
    p.add_argument("--test", required=True, help="labeled test CSV path")
    p.add_argument("--model", required=True, help="model path")
    p.add_argument("--out", default=None)
    p.add_argument("--at-n", type=int, default=None,
                   help="precision cutoff (default: number of positives)")
    _add_label_params(p)

    p = sub.add_parser("bench", help="time training and scoring over repetitions")
    p.add_argument("--train", default=None, help="training CSV path")
    p.add_argument("--out", default=None)
    p.add_argument("--repeats", type=int, default=5)
    _add_model_params(p)
    _add_label_params(p)
    _add_generator_params(p)

    p = sub.add_parser("synth", help="write a synthetic labeled CSV")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--seed", type=int, default=0)
    _add_generator_params(p)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = RunConfig.from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (ModelFileError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())
