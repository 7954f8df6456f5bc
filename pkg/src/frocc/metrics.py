"""Evaluation measures: ROC-AUC, precision@n, chance-adjusted precision@n."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from frocc.errors import ConfigError, DataError


def _check_scores_labels(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=bool)
    if s.ndim != 1 or y.shape != s.shape:
        raise DataError(f"scores {s.shape} and labels {y.shape} must be equal-length vectors")
    if s.size == 0:
        raise DataError("empty score vector")
    return s, y


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their group."""
    order = np.argsort(values, kind="stable")
    sorted_v = values[order]
    boundary = np.flatnonzero(np.diff(sorted_v) != 0)
    starts = np.concatenate(([0], boundary + 1))
    ends = np.concatenate((boundary, [values.size - 1]))
    # (start + end + 2) / 2 is exact in binary for integer indices.
    group_rank = (starts + ends + 2) / 2.0
    ranks = np.empty(values.size, dtype=np.float64)
    ranks[order] = np.repeat(group_rank, ends - starts + 1)
    return ranks


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve via the rank (Mann-Whitney) statistic.

    Equals P(score_pos > score_neg) + 0.5 * P(score_pos = score_neg) over all
    positive/negative pairs; positives are inliers and are expected to score
    high. Exact for the coarse tied score grids this classifier produces.

    Raises:
        DataError: If either class is absent.
    """
    s, y = _check_scores_labels(scores, labels)
    n_pos = int(np.count_nonzero(y))
    n_neg = s.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("roc_auc needs at least one positive and one negative label")
    ranks = _midranks(s)
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def precision_at_n(scores, labels, n: int) -> float:
    """Fraction of true outliers (negatives) among the n lowest-scoring points.

    Ties are broken by stable input order.
    """
    s, y = _check_scores_labels(scores, labels)
    if not 1 <= n <= s.size:
        raise ConfigError(f"n must be in [1, {s.size}], got {n}")
    bottom = np.argsort(s, kind="stable")[:n]
    return float(np.count_nonzero(~y[bottom]) / n)


def adjusted_precision_at_n(scores, labels, n: int) -> float:
    """Precision@n normalized so random ranking scores 0 and perfect scores 1.

    adjusted = (prec - e) / (1 - e) with e = n_neg / N, the expected
    precision of a random ranking. Can be negative for worse-than-chance
    rankings.

    Raises:
        DataError: If the test set is all-negative (e = 1).
    """
    s, y = _check_scores_labels(scores, labels)
    expected = float(np.count_nonzero(~y)) / s.size
    if expected >= 1.0:
        raise DataError("adjusted precision undefined for an all-negative test set")
    prec = precision_at_n(s, y, n)
    return float((prec - expected) / (1.0 - expected))


@dataclass(frozen=True)
class EvalReport:
    """Flat evaluation summary; serializes to a flat JSON object."""

    roc_auc: float
    precision_at_n: float
    adjusted_precision_at_n: float
    n: int
    train_seconds: float
    test_seconds: float
    n_train: int
    n_test_pos: int
    n_test_neg: int

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(model, test, n: int | None = None, train_seconds: float = 0.0,
             n_train: int = 0) -> EvalReport:
    """Score a labeled test dataset and compute all report metrics.

    Args:
        model: Fitted FroccModel.
        test: Labeled Dataset (True = positive/inlier).
        n: Cutoff for precision@n; defaults to the positive count.
        train_seconds: Training time to record, when known.
        n_train: Training set size to record, when known.
    """
    if test.labels is None:
        raise DataError("evaluate requires a labeled test dataset")
    t0 = time.perf_counter()
    scores = model.decision_score(test.points)
    test_seconds = time.perf_counter() - t0
    n_pos = int(np.count_nonzero(test.labels))
    n_neg = test.n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("test set must contain both classes")
    if n is None:
        n = n_pos
    return EvalReport(
        roc_auc=roc_auc(scores, test.labels),
        precision_at_n=precision_at_n(scores, test.labels, n),
        adjusted_precision_at_n=adjusted_precision_at_n(scores, test.labels, n),
        n=int(n),
        train_seconds=float(train_seconds),
        test_seconds=float(test_seconds),
        n_train=int(n_train),
        n_test_pos=n_pos,
        n_test_neg=n_neg,
    )
