"""Training, scoring, and persistence of random-projection one-class models.

A fitted model holds m unit directions and, per direction, the inlier
intervals (exact mode) or occupancy bins (binned mode) of the training
projections. A query point is YES only if its projection is an inlier along
every direction; the graded `decision_score` is the fraction of directions
that accept it, so YES corresponds to a score of exactly 1.0.

Every training point scores 1.0 by construction: fitting and scoring share
one projection routine (frocc.core.project) whose results do not depend on
batch size, so the projection a point had at fit time is reproduced bit for
bit at query time.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass

import numpy as np

from frocc.core import Kernel, check_seed, project, sample_unit_vectors
from frocc.data import Standardizer, validate_points
from frocc.errors import ConfigError, DataError, ModelFileError
from frocc.intervals import BinSet, IntervalSet, build_bins, build_intervals_exact

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MODES = ("exact", "binned")


@dataclass(frozen=True)
class ModelSize:
    """Total endpoint count 2*sum(k_i); in binned mode k_i counts occupied runs
    and the size is only an approximation of the exact-mode value."""

    total: int
    per_direction: tuple[int, ...]
    approximate: bool = False


@dataclass
class FroccModel:
    """Fitted one-class classifier. Immutable after fit; safe to share."""

    m: int
    epsilon: float
    kernel: Kernel
    directions: np.ndarray
    per_direction: list
    mode: str
    seed: int
    d: int
    standardizer: Standardizer | None = None

    def _prepare(self, x) -> tuple[np.ndarray, bool]:
        X = np.asarray(x, dtype=np.float64)
        single = X.ndim == 1
        X = validate_points(X)
        if X.shape[1] != self.d:
            raise DataError(f"expected {self.d}-dimensional points, got {X.shape[1]}")
        if self.standardizer is not None:
            X = self.standardizer.apply(X)
        return X, single

    def _hits(self, prepared: np.ndarray) -> np.ndarray:
        P = project(prepared, self.directions, self.kernel)
        hits = np.empty((prepared.shape[0], self.m), dtype=bool)
        for i, region in enumerate(self.per_direction):
            hits[:, i] = region.contains(P[:, i])
        return hits

    def direction_hits(self, x) -> np.ndarray:
        """Boolean (n, m) matrix: hit (j, i) iff direction i accepts point j."""
        X, _ = self._prepare(x)
        return self._hits(X)

    def decision_score(self, x):
        """Fraction of directions whose inlier region contains the projection.

        Accepts a single point (returns a float in [0, 1]) or a matrix
        (returns an array). Lower scores are more anomalous.
        """
        X, single = self._prepare(x)
        scores = self._hits(X).sum(axis=1) / self.m
        return float(scores[0]) if single else scores

    def predict(self, x):
        """YES iff every direction accepts the point (decision_score == 1.0)."""
        X, single = self._prepare(x)
        yes = self._hits(X).all(axis=1)
        return bool(yes[0]) if single else yes

    def model_size(self) -> ModelSize:
        """Twice the interval count summed over directions.

        In binned mode interval counts are undefined, so runs of occupied
        bins are counted instead and the result is flagged approximate.
        """
        if self.mode == "exact":
            counts = tuple(iv.count for iv in self.per_direction)
            return ModelSize(total=2 * sum(counts), per_direction=counts)
        counts = []
        for bins in self.per_direction:
            occ = bins.occupied
            runs = int(occ[0]) + int(np.count_nonzero(occ[1:] & ~occ[:-1]))
            counts.append(runs)
        return ModelSize(total=2 * sum(counts), per_direction=tuple(counts), approximate=True)

    def save(self, path) -> None:
        """Write the model as canonical versioned JSON (bit-exact round trip)."""
        body = _serialize_body(self)
        digest = hashlib.sha256(body.encode("ascii")).hexdigest()
        with open(path, "w", encoding="ascii") as fh:
            fh.write(body[:-1] + ',"checksum":"sha256:' + digest + '"}\n')
        logger.info("saved model (m=%d, epsilon=%g, mode=%s) to %s",
                    self.m, self.epsilon, self.mode, path)


def fit(
    X,
    m: int,
    epsilon: float,
    kernel: Kernel | None = None,
    seed: int = 0,
    mode: str = "exact",
    n_jobs: int = 1,
    standardizer: Standardizer | None = None,
) -> FroccModel:
    """Train a model on positive-only points.

    For each of m seeded unit directions, all points are projected through
    the kernel in a single pass and the sorted projections are grouped into
    margin-separated intervals (or occupancy bins). Directions are
    independent, so the result does not depend on n_jobs.

    Args:
        X: Training points, shape (n, d).
        m: Number of classifying directions, >= 1.
        epsilon: Separation parameter in (0, 1]; epsilon = 1 keeps one
            interval per direction and skips sorting entirely.
        kernel: Projection kernel; defaults to linear. Unset hyperparameters
            are resolved against d.
        seed: Master seed; direction i depends only on (seed, i).
        mode: "exact" intervals or "binned" occupancy bins.
        n_jobs: Worker threads for projection row chunks.
        standardizer: Optional per-column scaling applied before projecting
            and stored with the model.

    Raises:
        DataError: Empty input or non-finite features.
        ConfigError: Bad m, epsilon, mode, or seed.
    """
    X = validate_points(X)
    if standardizer is not None:
        X = standardizer.apply(X)
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ConfigError(f"m must be a positive integer, got {m}")
    epsilon = float(epsilon)
    if not 0.0 < epsilon <= 1.0:
        raise ConfigError(f"epsilon must be in (0, 1], got {epsilon}")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    seed = check_seed(seed)
    n, d = X.shape
    kernel = (kernel or Kernel.linear()).resolved(d)

    t0 = time.perf_counter()
    W = sample_unit_vectors(m, d, seed)
    P = project(X, W, kernel, n_jobs=n_jobs)

    per_direction: list = []
    if epsilon == 1.0:
        # Only the projection extremes matter; no sort needed.
        los = P.min(axis=0)
        his = P.max(axis=0)
        for i in range(m):
            lo, hi = float(los[i]), float(his[i])
            if mode == "exact":
                per_direction.append(
                    IntervalSet(lows=np.array([lo]), highs=np.array([hi]),
                                min_raw=lo, max_raw=hi, epsilon=epsilon)
                )
            else:
                per_direction.append(
                    BinSet(occupied=np.array([True]), min_raw=lo, max_raw=hi, epsilon=epsilon)
                )
    else:
        PT = np.ascontiguousarray(P.T)
        PT.sort(axis=1)
        build = build_intervals_exact if mode == "exact" else build_bins
        for i in range(m):
            per_direction.append(build(PT[i], epsilon))

    logger.info("fit m=%d epsilon=%g kernel=%s mode=%s on n=%d d=%d in %.3fs",
                m, epsilon, kernel.variant, mode, n, d, time.perf_counter() - t0)
    return FroccModel(
        m=int(m), epsilon=epsilon, kernel=kernel, directions=W,
        per_direction=per_direction, mode=mode, seed=seed, d=int(d),
        standardizer=standardizer,
    )


# --- serialization -----------------------------------------------------------
#
# Canonical JSON: fixed key order, floats as %.17g (guaranteed bit-exact on
# reload), no whitespace. The checksum is the sha256 of the serialized body
# without the checksum field; load() rebuilds the model, re-serializes it,
# and compares digests, so any corruption of a stored number is caught.


def _canon(obj) -> str:
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_canon(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_canon(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _serialize_body(model: FroccModel) -> str:
    per_direction = []
    for region in model.per_direction:
        entry = {"min_raw": region.min_raw, "max_raw": region.max_raw}
        if model.mode == "exact":
            entry["intervals"] = [
                [lo, hi] for lo, hi in zip(region.lows, region.highs)
            ]
        else:
            entry["occupied"] = [bool(b) for b in region.occupied]
        per_direction.append(entry)
    doc = {
        "format_version": FORMAT_VERSION,
        "m": model.m,
        "epsilon": model.epsilon,
        "kernel": {"variant": model.kernel.variant, "params": model.kernel.params()},
        "mode": model.mode,
        "seed": model.seed,
        "d": model.d,
        "directions": model.directions,
        "per_direction": per_direction,
    }
    if model.standardizer is not None:
        doc["standardizer"] = {
            "mean": model.standardizer.mean,
            "scale": model.standardizer.scale,
        }
    return _canon(doc)


def load(path) -> FroccModel:
    """Load a model saved by `FroccModel.save`, verifying version and checksum.

    Raises:
        ModelFileError: Malformed JSON, missing fields, unsupported
            format_version, or checksum mismatch.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: malformed model file ({exc})") from None
    if not isinstance(doc, dict):
        raise ModelFileError(f"{path}: malformed model file (not an object)")

    version = doc.get("format_version")
    if not isinstance(version, int) or version < 1:
        raise ModelFileError(f"{path}: missing or invalid format_version")
    if version > FORMAT_VERSION:
        raise ModelFileError(
            f"{path}: format_version {version} is newer than supported {FORMAT_VERSION}"
        )

    try:
        mode = doc["mode"]
        if mode not in MODES:
            raise ModelFileError(f"{path}: unknown mode {mode!r}")
        epsilon = float(doc["epsilon"])
        if not 0.0 < epsilon <= 1.0:
            raise ModelFileError(f"{path}: epsilon {epsilon} outside (0, 1]")
        kernel = Kernel.from_params(doc["kernel"]["variant"], doc["kernel"]["params"])
        directions = np.asarray(doc["directions"], dtype=np.float64)
        m = int(doc["m"])
        d = int(doc["d"])
        if m < 1 or d < 1:
            raise ModelFileError(f"{path}: m and d must be positive, got m={m} d={d}")
        if directions.shape != (m, d):
            raise ModelFileError(
                f"{path}: directions shape {directions.shape} does not match m={m}, d={d}"
            )
        per_direction: list = []
        for entry in doc["per_direction"]:
            lo = float(entry["min_raw"])
            hi = float(entry["max_raw"])
            if mode == "exact":
                pairs = np.asarray(entry["intervals"], dtype=np.float64).reshape(-1, 2)
                per_direction.append(
                    IntervalSet(lows=pairs[:, 0].copy(), highs=pairs[:, 1].copy(),
                                min_raw=lo, max_raw=hi, epsilon=epsilon)
                )
            else:
                per_direction.append(
                    BinSet(occupied=np.asarray(entry["occupied"], dtype=bool),
                           min_raw=lo, max_raw=hi, epsilon=epsilon)
                )
        if len(per_direction) != m:
            raise ModelFileError(
                f"{path}: {len(per_direction)} per-direction entries for m={m}"
            )
        standardizer = None
        if "standardizer" in doc:
            standardizer = Standardizer(
                mean=np.asarray(doc["standardizer"]["mean"], dtype=np.float64),
                scale=np.asarray(doc["standardizer"]["scale"], dtype=np.float64),
            )
        model = FroccModel(
            m=m, epsilon=epsilon, kernel=kernel, directions=directions,
            per_direction=per_direction, mode=mode, seed=int(doc["seed"]), d=d,
            standardizer=standardizer,
        )
        stored = doc["checksum"]
    except ModelFileError:
        raise
    except (KeyError, TypeError, ValueError, ConfigError) as exc:
        raise ModelFileError(f"{path}: malformed model file ({exc})") from None

    digest = "sha256:" + hashlib.sha256(_serialize_body(model).encode("ascii")).hexdigest()
    if stored != digest:
        raise ModelFileError(f"{path}: checksum mismatch")
    return model


def save(model: FroccModel, path) -> None:
    """Functional alias for `FroccModel.save`."""
    model.save(path)
