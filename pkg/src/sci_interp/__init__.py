"""Statistically consistent interpolation: wiNN and friends."""

__version__ = "0.1.0"

from .core import (
    COINCIDENCE_TOL,
    HolderParams,
    LabeledDataset,
    WeightScheme,
    distance,
    optimal_k,
    samples_needed,
    weight,
)
from .estimators import (
    HilbertEstimator,
    KnnEstimator,
    LagrangeEstimator,
    OneNNEstimator,
    ShepardEstimator,
    SimplexEstimator,
    WinnEstimator,
    one_nn_predict,
    simplex_build,
    winn_classify,
    winn_predict,
)
from .neighbors import NeighborIndex, NeighborList, build_index, knn_brute, knn_query
from .synthgen import Fig1Regression, Fig2Gaussians, HolderRegression, generate
