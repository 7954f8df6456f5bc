"""Fast random-projection one-class classification.

Train on positive-only data by projecting it onto seeded random unit
directions and keeping, per direction, the separation-split intervals of the
training projections. A point is an inlier when every direction accepts its
projection; the graded decision score is the fraction of directions that do.
"""

from frocc.core import Kernel, kernel_eval, project, sample_unit_vectors
from frocc.data import (
    Dataset,
    Standardizer,
    fit_standardizer,
    gen_gaussian_mixture,
    gen_two_moons,
    load_csv,
    occ_split,
    sample_uniform_box,
    save_csv,
)
from frocc.errors import ConfigError, DataError, FroccError, ModelFileError
from frocc.intervals import (
    BinSet,
    IntervalSet,
    build_bins,
    build_intervals_exact,
    query_bins,
    query_intervals,
)
from frocc.metrics import (
    EvalReport,
    adjusted_precision_at_n,
    evaluate,
    precision_at_n,
    roc_auc,
)
from frocc.model import FroccModel, ModelSize, fit, load, save

__version__ = "0.1.0"

__all__ = [
    "BinSet",
    "ConfigError",
    "DataError",
    "Dataset",
    "EvalReport",
    "FroccError",
    "FroccModel",
    "IntervalSet",
    "Kernel",
    "ModelFileError",
    "ModelSize",
    "Standardizer",
    "adjusted_precision_at_n",
    "build_bins",
    "build_intervals_exact",
    "evaluate",
    "fit",
    "fit_standardizer",
    "gen_gaussian_mixture",
    "gen_two_moons",
    "kernel_eval",
    "load",
    "load_csv",
    "occ_split",
    "precision_at_n",
    "project",
    "query_bins",
    "query_intervals",
    "roc_auc",
    "sample_uniform_box",
    "sample_unit_vectors",
    "save",
    "save_csv",
]
