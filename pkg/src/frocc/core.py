"""Numeric primitives: seeded unit-vector sampling, kernels, batched projection.

Reproducibility is the organizing constraint of this module:

* Direction i is generated from its own generator keyed by (seed, i), so the
  first m rows of an (m', d) sample equal the full (m, d) sample whenever
  m < m'. Serial and parallel generation therefore agree, and models built
  with more directions extend models built with fewer.
* All projections (training and scoring) run through `project`, which feeds
  BLAS fixed-shape tiles (padded in both the point and direction axes). GEMM
  kernels can pick different reduction orders for different matrix shapes,
  which would make a point project to slightly different values at fit time
  and at query time; fixing the tile shape removes that source of
  nondeterminism, so containment checks and direction-prefix couplings are
  bit-exact.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from frocc.errors import ConfigError, DataError

MAX_SEED = 2**64 - 1

KERNEL_VARIANTS = ("linear", "rbf", "poly", "sigmoid")

# Fixed GEMM tile; projection pads its last blocks to this shape in both
# dimensions, so the BLAS call shape never depends on n or m.
_CHUNK_ROWS = 1024
_CHUNK_COLS = 128


@dataclass(frozen=True)
class Kernel:
    """Projection function applied between a unit direction and a data point.

    Variants:
        linear:  <w, x>
        rbf:     exp(-gamma * ||w - x||^2)
        poly:    (<w, x> + coef0) ** degree
        sigmoid: tanh(gamma * <w, x> + coef0)

    Unset hyperparameters are filled by `resolved(d)`: gamma defaults to 1/d,
    degree to 3, coef0 to 0. The rbf and sigmoid variants compare a unit
    vector against raw features, so heavily scaled data should be
    standardized first (see frocc.data.fit_standardizer).
    """

    variant: str = "linear"
    gamma: float | None = None
    degree: int | None = None
    coef0: float | None = None

    def __post_init__(self) -> None:
        if self.variant not in KERNEL_VARIANTS:
            raise ConfigError(
                f"unknown kernel variant {self.variant!r}; expected one of {KERNEL_VARIANTS}"
            )
        if self.gamma is not None and not self.gamma > 0:
            raise ConfigError(f"gamma must be > 0, got {self.gamma}")
        if self.degree is not None and self.degree < 1:
            raise ConfigError(f"degree must be >= 1, got {self.degree}")

    @classmethod
    def linear(cls) -> "Kernel":
        return cls("linear")

    @classmethod
    def rbf(cls, gamma: float | None = None) -> "Kernel":
        return cls("rbf", gamma=gamma)

    @classmethod
    def poly(cls, degree: int | None = None, coef0: float | None = None) -> "Kernel":
        return cls("poly", degree=degree, coef0=coef0)

    @classmethod
    def sigmoid(cls, gamma: float | None = None, coef0: float | None = None) -> "Kernel":
        return cls("sigmoid", gamma=gamma, coef0=coef0)

    def resolved(self, d: int) -> "Kernel":
        """Return a copy with all hyperparameters the variant uses made explicit."""
        if d < 1:
            raise ConfigError(f"dimension must be >= 1, got {d}")
        if self.variant == "linear":
            return Kernel("linear")
        if self.variant == "rbf":
            return Kernel("rbf", gamma=self.gamma if self.gamma is not None else 1.0 / d)
        if self.variant == "poly":
            return Kernel(
                "poly",
                degree=self.degree if self.degree is not None else 3,
                coef0=self.coef0 if self.coef0 is not None else 0.0,
            )
        return Kernel(
            "sigmoid",
            gamma=self.gamma if self.gamma is not None else 1.0 / d,
            coef0=self.coef0 if self.coef0 is not None else 0.0,
        )

    def params(self) -> dict:
        """Hyperparameters the variant actually uses, for serialization."""
        out: dict = {}
        if self.variant in ("rbf", "sigmoid") and self.gamma is not None:
            out["gamma"] = float(self.gamma)
        if self.variant == "poly" and self.degree is not None:
            out["degree"] = int(self.degree)
        if self.variant in ("poly", "sigmoid") and self.coef0 is not None:
            out["coef0"] = float(self.coef0)
        return out

    @classmethod
    def from_params(cls, variant: str, params: dict) -> "Kernel":
        return cls(
            variant,
            gamma=params.get("gamma"),
            degree=params.get("degree"),
            coef0=params.get("coef0"),
        )


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise ConfigError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed must be in [0, 2**64), got {seed}")
    return int(seed)


def _direction_rng(seed: int, index: int) -> np.random.Generator:
    # Keying each row by (seed, index) gives prefix stability: row i never
    # depends on how many rows are requested.
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def sample_unit_vectors(m: int, d: int, seed: int) -> np.ndarray:
    """Draw m independent directions uniformly from the unit sphere in R^d.

    Each row is a d-dimensional standard Gaussian draw normalized to unit
    length; spherical symmetry makes the direction uniform.

    Args:
        m: Number of directions, >= 1.
        d: Ambient dimension, >= 1.
        seed: Master seed; row i depends only on (seed, i).

    Returns:
        Array of shape (m, d) with unit rows.
    """
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    if d < 1:
        raise ConfigError(f"d must be >= 1, got {d}")
    seed = check_seed(seed)

    out = np.empty((m, d), dtype=np.float64)
    for i in range(m):
        rng = _direction_rng(seed, i)
        v = rng.standard_normal(d)
        norm = float(np.linalg.norm(v))
        while norm == 0.0:  # measure-zero; redraw from the same stream
            v = rng.standard_normal(d)
            norm = float(np.linalg.norm(v))
        out[i] = v / norm
    return out


def kernel_eval(kernel: Kernel, w: np.ndarray, x: np.ndarray) -> float:
    """Evaluate the kernel between one direction and one point.

    Reference scalar path; model fitting and scoring use the batched
    `project` below, which agrees with this up to floating-point rounding.

    Raises:
        DataError: If w and x have different dimensions.
    """
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if w.shape != x.shape or w.ndim != 1:
        raise DataError(f"dimension mismatch: w has shape {w.shape}, x has shape {x.shape}")
    k = kernel.resolved(w.size)
    dot = float(np.dot(w, x))
    if k.variant == "linear":
        return dot
    if k.variant == "rbf":
        return float(np.exp(-k.gamma * float(np.sum((w - x) ** 2))))
    if k.variant == "poly":
        return float((dot + k.coef0) ** k.degree)
    return float(np.tanh(k.gamma * dot + k.coef0))


def _transform_tile(kernel: Kernel, g: np.ndarray, x2: np.ndarray | None) -> np.ndarray:
    if kernel.variant == "linear":
        return g
    if kernel.variant == "rbf":
        # ||w - x||^2 expanded with ||w||^2 taken as exactly 1; the same
        # expression at fit and query time keeps containment bit-exact.
        return np.exp(-kernel.gamma * (x2[:, None] - 2.0 * g + 1.0))
    if kernel.variant == "poly":
        return (g + kernel.coef0) ** kernel.degree
    return np.tanh(kernel.gamma * g + kernel.coef0)


def _column_blocks(W: np.ndarray) -> list[tuple[int, int, np.ndarray]]:
    m, d = W.shape
    blocks = []
    for c0 in range(0, m, _CHUNK_COLS):
        cols = min(_CHUNK_COLS, m - c0)
        blk = np.zeros((d, _CHUNK_COLS), dtype=np.float64)
        blk[:, :cols] = W[c0 : c0 + cols].T
        blocks.append((c0, cols, blk))
    return blocks


def project(X: np.ndarray, W: np.ndarray, kernel: Kernel, n_jobs: int = 1) -> np.ndarray:
    """Project every point onto every direction through the kernel.

    Args:
        X: Points, shape (n, d), float64.
        W: Unit directions, shape (m, d).
        kernel: Kernel with resolved hyperparameters.
        n_jobs: Row-chunk workers; any value yields identical output.

    Returns:
        Array of shape (n, m); entry (j, i) is kernel(W[i], X[j]).

    Entry values depend only on X[j] and W[i], never on the batch: rows are
    processed in fixed-height zero-padded chunks and directions in
    fixed-width zero-padded blocks, so point j projects identically whether
    scored alone or inside a training matrix, and direction i projects
    identically in an m-direction and an m'-direction model.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if X.ndim != 2 or W.ndim != 2 or X.shape[1] != W.shape[1]:
        raise DataError(
            f"dimension mismatch: points have shape {X.shape}, directions {W.shape}"
        )
    n = X.shape[0]
    m = W.shape[0]
    blocks = _column_blocks(W)
    needs_norms = kernel.variant == "rbf"
    out = np.empty((n, m), dtype=np.float64)

    def run(start: int) -> None:
        stop = min(start + _CHUNK_ROWS, n)
        rows = stop - start
        if rows < _CHUNK_ROWS:
            padded = np.zeros((_CHUNK_ROWS, X.shape[1]), dtype=np.float64)
            padded[:rows] = X[start:stop]
        else:
            padded = X[start:stop]
        x2 = np.einsum("ij,ij->i", padded, padded) if needs_norms else None
        for c0, cols, blk in blocks:
            tile = _transform_tile(kernel, padded @ blk, x2)
            out[start:stop, c0 : c0 + cols] = tile[:rows, :cols]

    starts = range(0, n, _CHUNK_ROWS)
    if n_jobs > 1 and n > _CHUNK_ROWS:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    return out
