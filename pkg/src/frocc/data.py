"""Dataset ingestion, one-class train/test splitting, and synthetic generators."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from frocc.errors import ConfigError, DataError


@dataclass
class Dataset:
    """Dense point matrix with optional binary labels (True = positive/normal)."""

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""

    def __post_init__(self) -> None:
        self.points = validate_points(self.points)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=bool)
            if self.labels.shape != (self.n,):
                raise DataError(
                    f"labels length {self.labels.size} does not match {self.n} points"
                )

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])


def validate_points(points) -> np.ndarray:
    try:
        X = np.asarray(points, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DataError(f"points are not a numeric matrix: {exc}") from None
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DataError(f"points must be a non-empty 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DataError("points contain non-finite values")
    return X


@dataclass(frozen=True)
class Standardizer:
    """Per-column shift/scale learned on training data (opt-in preprocessing)."""

    mean: np.ndarray
    scale: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale


def fit_standardizer(X: np.ndarray) -> Standardizer:
    X = validate_points(X)
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return Standardizer(mean=mean, scale=scale)


def _resolve_label_column(label_column, header: list[str] | None, width: int):
    """Return (index, display_name) of the label column, or (None, None)."""
    if label_column is None:
        return None, None
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None:
            raise ConfigError(
                f"label column {label_column!r} given by name but the file has no header"
            )
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not found in header {header}")
        return header.index(label_column), label_column
    idx = int(label_column)
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise DataError(f"label column index {label_column} out of range for {width} columns")
    return idx, header[idx] if header else str(idx)


def load_csv(
    path,
    label_column=None,
    has_header: bool = False,
    positive_label: str | None = None,
    name: str | None = None,
) -> Dataset:
    """Load a rectangular numeric CSV, optionally peeling off a label column.

    Args:
        path: CSV file path; comma-delimited, optionally with a header row.
        label_column: Column name (requires header) or integer index holding
            class labels; all other columns must be numeric.
        has_header: Whether the first row is a header.
        positive_label: Cell value marking the positive class; required when
            label_column is given.
        name: Dataset name; defaults to the path.

    Raises:
        DataError: Ragged rows, non-numeric feature cells (reported with the
            file row and column), missing label column, or an empty file.
    """
    if label_column is not None and positive_label is None:
        raise ConfigError("positive_label is required when label_column is given")

    rows: list[list[float]] = []
    raw_labels: list[str] = []
    header: list[str] | None = None
    width: int | None = None
    label_idx = None

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for record in reader:
            if not record or (len(record) == 1 and record[0].strip() == ""):
                continue  # blank line
            if header is None and has_header:
                header = [c.strip() for c in record]
                width = len(header)
                label_idx, _ = _resolve_label_column(label_column, header, width)
                continue
            if width is None:
                width = len(record)
                label_idx, _ = _resolve_label_column(label_column, header, width)
            if len(record) != width:
                raise DataError(
                    f"row {reader.line_num}: expected {width} fields, got {len(record)}"
                )
            feats = []
            for j, cell in enumerate(record):
                if j == label_idx:
                    raw_labels.append(cell.strip())
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    col = header[j] if header else str(j)
                    raise DataError(
                        f"row {reader.line_num}, column {col}: non-numeric value {cell.strip()!r}"
                    ) from None
                if not np.isfinite(value):
                    col = header[j] if header else str(j)
                    raise DataError(
                        f"row {reader.line_num}, column {col}: non-finite value {cell.strip()!r}"
                    )
                feats.append(value)
            rows.append(feats)

    if not rows:
        raise DataError(f"{path}: no data rows")
    points = np.asarray(rows, dtype=np.float64)
    labels = None
    if label_idx is not None:
        labels = np.asarray([lab == positive_label for lab in raw_labels], dtype=bool)
    return Dataset(points=points, labels=labels, name=name or str(path))


def save_csv(path, dataset: Dataset, label_name: str = "label") -> None:
    """Write a dataset as CSV with a header; labels become a 1/0 column.

    Floats are written with up to 17 significant digits so they re-load
    bit-exactly.
    """
    d = dataset.d
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        cols = [f"f{j}" for j in range(d)]
        if dataset.labels is not None:
            cols.append(label_name)
        writer.writerow(cols)
        for i in range(dataset.n):
            row = [format(v, ".17g") for v in dataset.points[i]]
            if dataset.labels is not None:
                row.append("1" if dataset.labels[i] else "0")
            writer.writerow(row)


def occ_split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Split a labeled dataset for one-class evaluation.

    The training set is an unlabeled random fraction of the positives. The
    test set is the remaining positives plus an equal number of sampled
    negatives; when too few negatives exist, all of them are used and a
    warning is emitted.
    """
    if ds.labels is None:
        raise DataError("occ_split requires a labeled dataset")
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    pos_idx = np.flatnonzero(ds.labels)
    neg_idx = np.flatnonzero(~ds.labels)
    if pos_idx.size == 0:
        raise DataError("no positive instances to train on")

    rng = np.random.default_rng(seed)
    pos_perm = rng.permutation(pos_idx)
    n_train = int(train_fraction * pos_idx.size)
    if n_train < 1 or n_train == pos_idx.size:
        raise DataError(
            f"train_fraction {train_fraction} leaves an empty train or test side "
            f"for {pos_idx.size} positives"
        )
    train_idx = pos_perm[:n_train]
    test_pos_idx = pos_perm[n_train:]

    need = test_pos_idx.size
    if neg_idx.size >= need:
        test_neg_idx = rng.permutation(neg_idx)[:need]
    else:
        warnings.warn(
            f"only {neg_idx.size} negatives available for {need} test positives; using all",
            stacklevel=2,
        )
        test_neg_idx = neg_idx
    train = Dataset(points=ds.points[train_idx].copy(), name=f"{ds.name}[train]")
    test = Dataset(
        points=np.vstack([ds.points[test_pos_idx], ds.points[test_neg_idx]]),
        labels=np.concatenate(
            [np.ones(test_pos_idx.size, bool), np.zeros(test_neg_idx.size, bool)]
        ),
        name=f"{ds.name}[test]",
    )
    return train, test


def gen_gaussian_mixture(k: int, d: int, n: int, spread: float, seed: int) -> Dataset:
    """Sample n points from k equal-weight spherical Gaussians.

    Centers are drawn uniformly from [-5, 5]^d; each component has standard
    deviation `spread`.
    """
    if k < 1 or d < 1 or n < 1:
        raise ConfigError(f"k, d, n must be >= 1, got k={k} d={d} n={n}")
    if not spread > 0:
        raise ConfigError(f"spread must be > 0, got {spread}")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-5.0, 5.0, size=(k, d))
    comp = rng.integers(0, k, size=n)
    points = centers[comp] + spread * rng.standard_normal((n, d))
    return Dataset(
        points=points,
        name=f"gaussians(k={k},d={d},n={n},spread={spread},seed={seed})",
    )


def gen_two_moons(n: int, noise: float, seed: int) -> Dataset:
    """Generate the interleaved half-circles dataset; the upper moon is positive.

    The upper moon has center (0, 0), the lower moon center (1, 0.5); both
    have radius 1. Gaussian noise with standard deviation `noise` is added.
    """
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    if noise < 0:
        raise ConfigError(f"noise must be >= 0, got {noise}")
    n_in = n // 2
    n_out = n - n_in
    t_out = np.linspace(0.0, np.pi, n_out)
    t_in = np.linspace(0.0, np.pi, n_in)
    outer = np.column_stack([np.cos(t_out), np.sin(t_out)])
    inner = np.column_stack([1.0 - np.cos(t_in), 0.5 - np.sin(t_in)])
    points = np.vstack([outer, inner])
    rng = np.random.default_rng(seed)
    points = points + noise * rng.standard_normal(points.shape)
    labels = np.concatenate([np.ones(n_out, bool), np.zeros(n_in, bool)])
    return Dataset(points=points, labels=labels, name=f"moons(n={n},noise={noise},seed={seed})")


def sample_uniform_box(n: int, lows, highs, seed: int) -> np.ndarray:
    """Sample n points uniformly from an axis-aligned box (outlier generator)."""
    lows = np.asarray(lows, dtype=np.float64)
    highs = np.asarray(highs, dtype=np.float64)
    rng = np.random.default_rng(seed)
    return rng.uniform(lows, highs, size=(n, lows.size))
