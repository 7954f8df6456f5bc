"""Shared test helpers: independent brute-force oracles and dataset lookup.

The oracles deliberately take different code paths from the library (scaled
coordinates instead of raw margins, pairwise loops instead of rank sums) so
that agreement is evidence, not tautology.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np


def brute_intervals(projections, epsilon: float) -> list[tuple[float, float]]:
    """Reference interval constructor: greedy maximal runs on scaled values.

    Projections are shifted and scaled onto [0, 1]; a run extends while the
    scaled gap to the next point is < epsilon and breaks otherwise (a gap
    exactly equal to epsilon breaks). epsilon = 1 spans everything.
    """
    p = sorted(float(v) for v in projections)
    lo, hi = p[0], p[-1]
    if epsilon == 1.0 or hi == lo:
        return [(lo, hi)]
    span = hi - lo
    y = [(v - lo) / span for v in p]
    runs = []
    start = 0
    for i in range(1, len(p)):
        if y[i] - y[i - 1] >= epsilon:
            runs.append((p[start], p[i - 1]))
            start = i
    runs.append((p[start], p[-1]))
    return runs


def brute_query(intervals: list[tuple[float, float]], value: float) -> bool:
    """Reference membership test: linear scan over closed intervals."""
    return any(lo <= value <= hi for lo, hi in intervals)


def brute_query_many(intervals: list[tuple[float, float]], values) -> np.ndarray:
    """Vectorized form of `brute_query` for large probe batches."""
    arr = np.asarray(intervals, dtype=np.float64).reshape(-1, 2)
    v = np.asarray(values, dtype=np.float64)
    return ((v[:, None] >= arr[None, :, 0]) & (v[:, None] <= arr[None, :, 1])).any(axis=1)


def brute_auc(scores, labels) -> float:
    """Reference AUC: explicit pair counting with half credit for ties."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=bool)
    pos = s[y][:, None]
    neg = s[~y][None, :]
    wins = np.count_nonzero(pos > neg)
    ties = np.count_nonzero(pos == neg)
    return float((wins + 0.5 * ties) / (pos.size * neg.size))


def find_mnist() -> Path | None:
    """Locate an MNIST file if one is available; None means skip.

    Recognized: $FROCC_MNIST pointing at a keras-style .npz (x_train/y_train
    arrays) or a CSV whose first column is the digit label, or the same files
    at data/mnist.npz, data/mnist.csv, or ~/.keras/datasets/mnist.npz.
    """
    candidates = []
    env = os.environ.get("FROCC_MNIST")
    if env:
        candidates.append(Path(env))
    here = Path(__file__).resolve().parent.parent
    candidates += [
        here / "data" / "mnist.npz",
        here / "data" / "mnist.csv",
        Path.home() / ".keras" / "datasets" / "mnist.npz",
    ]
    for path in candidates:
        if path.is_file():
            return path
    return None


def load_mnist_digit(path: Path, digit: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (pixels scaled to [0, 1], is_digit labels) for train+test pooled."""
    if path.suffix == ".npz":
        with np.load(path) as z:
            X = np.concatenate([z["x_train"].reshape(len(z["x_train"]), -1),
                                z["x_test"].reshape(len(z["x_test"]), -1)])
            y = np.concatenate([z["y_train"], z["y_test"]])
    else:
        raw = np.loadtxt(path, delimiter=",", skiprows=1 if _csv_has_header(path) else 0)
        y = raw[:, 0].astype(int)
        X = raw[:, 1:]
    return X.astype(np.float64) / 255.0, y == digit


def _csv_has_header(path: Path) -> bool:
    with open(path) as fh:
        first = fh.readline().split(",")[0]
    try:
        float(first)
        return False
    except ValueError:
        return True
