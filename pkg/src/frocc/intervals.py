"""Inlier intervals along one classifying direction.

Two representations of the same idea: sorted training projections are
grouped into runs, and a run breaks wherever the gap to the next projection
reaches the margin = epsilon * (max - min).

* `IntervalSet` stores the runs exactly as [lo, hi] pairs and answers
  membership by binary search.
* `BinSet` quantizes the projection range into ceil(1/epsilon) occupancy
  bins and answers membership by table lookup with a one-bin dilation; it
  trades a one-bin-width boundary blur for O(1) queries.

Conventions (both modes): interval endpoints are closed; a gap exactly equal
to the margin starts a new run; a trailing single-point run is kept, so
every training projection is always an inlier; when all projections are
equal the margin degenerates to zero and membership means equality within
an absolute tolerance of 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from frocc.errors import ConfigError, DataError

# Query tolerance when every training projection is identical (zero range).
ZERO_RANGE_ATOL = 1e-12

# Binned mode allocates ceil(1/epsilon) slots per direction; below this
# epsilon the bitmap stops being an optimization, use exact mode instead.
MAX_BINS = 10_000_000


def _validate_projections(projections: np.ndarray, epsilon: float) -> np.ndarray:
    p = np.asarray(projections, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise DataError("projections must be a non-empty 1-D array")
    if not np.all(np.isfinite(p)):
        raise DataError("projections contain non-finite values")
    if p.size > 1 and np.any(np.diff(p) < 0):
        raise DataError("projections must be sorted ascending")
    if not 0.0 < epsilon <= 1.0:
        raise ConfigError(f"epsilon must be in (0, 1], got {epsilon}")
    return p


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint closed intervals of inlier projections for one direction."""

    lows: np.ndarray
    highs: np.ndarray
    min_raw: float
    max_raw: float
    epsilon: float
    # Interleaved [lo0, hi0, lo1, hi1, ...] for binary-search queries.
    _flat: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lows = np.asarray(self.lows, dtype=np.float64)
        highs = np.asarray(self.highs, dtype=np.float64)
        flat = np.empty(2 * lows.size, dtype=np.float64)
        flat[0::2] = lows
        flat[1::2] = highs
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)
        object.__setattr__(self, "_flat", flat)

    @property
    def count(self) -> int:
        """Number of intervals."""
        return int(self.lows.size)

    def contains(self, values) -> bool | np.ndarray:
        """Membership test; scalar in, bool out; array in, bool array out."""
        v = np.asarray(values, dtype=np.float64)
        scalar = v.ndim == 0
        v1 = np.atleast_1d(v)
        if self.max_raw == self.min_raw:
            res = np.abs(v1 - self.min_raw) <= ZERO_RANGE_ATOL
        else:
            idx = np.searchsorted(self._flat, v1, side="right")
            res = (idx % 2) == 1
            at_edge = idx > 0
            res[at_edge] |= self._flat[idx[at_edge] - 1] == v1[at_edge]
        return bool(res[0]) if scalar else res


def build_intervals_exact(projections, epsilon: float) -> IntervalSet:
    """Group sorted projections into margin-separated runs.

    Consecutive projections closer than margin = epsilon * (max - min) merge
    into one interval; a gap >= margin starts a new one. epsilon = 1 always
    yields the single interval [min, max].

    Args:
        projections: Sorted 1-D array of projections, length >= 1.
        epsilon: Separation parameter in (0, 1].

    Raises:
        DataError: Empty, non-finite, or unsorted projections.
        ConfigError: epsilon outside (0, 1].
    """
    p = _validate_projections(projections, epsilon)
    lo = float(p[0])
    hi = float(p[-1])
    if epsilon == 1.0 or hi == lo:
        return IntervalSet(
            lows=np.array([lo]), highs=np.array([hi]),
            min_raw=lo, max_raw=hi, epsilon=float(epsilon),
        )
    margin = (hi - lo) * epsilon
    breaks = np.flatnonzero(np.diff(p) >= margin)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [p.size - 1]))
    return IntervalSet(
        lows=p[starts].copy(), highs=p[ends].copy(),
        min_raw=lo, max_raw=hi, epsilon=float(epsilon),
    )


def query_intervals(intervals: IntervalSet, value: float) -> bool:
    """True iff value lies in some closed interval of the set."""
    return bool(intervals.contains(value))


@dataclass(frozen=True)
class BinSet:
    """Occupancy bitmap over ceil(1/epsilon) equal-width projection bins."""

    occupied: np.ndarray
    min_raw: float
    max_raw: float
    epsilon: float
    # Occupancy dilated by one bin on each side, precomputed for queries.
    _dilated: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        occ = np.asarray(self.occupied, dtype=bool)
        dil = occ.copy()
        dil[:-1] |= occ[1:]
        dil[1:] |= occ[:-1]
        object.__setattr__(self, "occupied", occ)
        object.__setattr__(self, "_dilated", dil)

    @property
    def n_bins(self) -> int:
        return int(self.occupied.size)

    def contains(self, values) -> bool | np.ndarray:
        v = np.asarray(values, dtype=np.float64)
        scalar = v.ndim == 0
        v1 = np.atleast_1d(v)
        if self.max_raw == self.min_raw:
            res = np.abs(v1 - self.min_raw) <= ZERO_RANGE_ATOL
        else:
            in_range = (v1 >= self.min_raw) & (v1 <= self.max_raw)
            res = np.zeros(v1.shape, dtype=bool)
            if np.any(in_range):
                idx = _bin_index(v1[in_range], self.min_raw, self.max_raw, self.n_bins)
                res[in_range] = self._dilated[idx]
        return bool(res[0]) if scalar else res


def _bin_index(values: np.ndarray, lo: float, hi: float, n_bins: int) -> np.ndarray:
    width = (hi - lo) / n_bins
    idx = np.floor((values - lo) / width).astype(np.int64)
    # The top bin is closed on the right; clipping also absorbs float
    # round-off at the boundary.
    return np.clip(idx, 0, n_bins - 1)


def build_bins(projections, epsilon: float) -> BinSet:
    """Quantize sorted projections into ceil(1/epsilon) occupancy bins.

    Raises the same errors as `build_intervals_exact`.
    """
    p = _validate_projections(projections, epsilon)
    lo = float(p[0])
    hi = float(p[-1])
    if hi == lo:
        # Degenerate range: one occupied pseudo-bin, equality queries only.
        return BinSet(occupied=np.array([True]), min_raw=lo, max_raw=hi, epsilon=float(epsilon))
    inv = 1.0 / epsilon
    if not np.isfinite(inv) or inv > MAX_BINS:
        raise ConfigError(
            f"epsilon={epsilon} needs more than {MAX_BINS} bins; use exact mode"
        )
    n_bins = int(math.ceil(inv))
    occupied = np.zeros(n_bins, dtype=bool)
    occupied[_bin_index(p, lo, hi, n_bins)] = True
    return BinSet(occupied=occupied, min_raw=lo, max_raw=hi, epsilon=float(epsilon))


def query_bins(bins: BinSet, value: float) -> bool:
    """True iff value falls in the raw range and lands in or next to an occupied bin."""
    return bool(bins.contains(value))
