"""Generalization error of min-norm least squares as the parameter count grows.

Data come from a ``D``-dimensional linear model observed ``m < D`` times; the
fit uses only the first ``p`` features. With identity design covariance the
generalization error of a fit is the squared parameter error, so no test
sampling is needed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .risk import _map_replicates, _mean_se
from .synthgen import make_rng, replicate_seed

RCOND = 1e-10
DEFAULT_P_GRID = (2, 5, 10, 15, 18, 20, 22, 25, 40, 70, 100)


def min_norm_lsq(X, Y) -> np.ndarray:
    """Minimum-norm least-squares solution via SVD.

    Singular values below ``1e-10 * sigma_max`` are treated as zero.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float).reshape(-1)
    if X.ndim != 2 or X.shape[0] != len(Y):
        raise ValueError(f"X must be (m, p) with m == len(Y); got {X.shape} and {Y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise ValueError("X and Y must be finite")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    if len(s) == 0 or s[0] == 0:
        return np.zeros(X.shape[1])
    keep = s > RCOND * s[0]
    coef = (U[:, keep].T @ Y) / s[keep]
    return Vt[keep].T @ coef


@dataclass(frozen=True)
class DescentSpec:
    m: int = 20
    D: int = 100
    p_grid: tuple = DEFAULT_P_GRID
    noise_sd: float = 0.5
    signal_norm: float = 1.0
    replicates: int = 200
    seed: int = 0

    def __post_init__(self):
        grid = tuple(int(p) for p in self.p_grid)
        object.__setattr__(self, "p_grid", grid)
        if not self.m < self.D:
            raise ValueError(f"need m < D, got m={self.m}, D={self.D}")
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("p_grid must be a nonempty increasing sequence")
        if grid[0] < 1 or grid[-1] > self.D:
            raise ValueError(f"p_grid must lie in [1, D={self.D}]")
        if self.noise_sd < 0 or not self.signal_norm > 0:
            raise ValueError("need noise_sd >= 0 and signal_norm > 0")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


@dataclass
class DescentRecord:
    p: int
    mean_ge: float
    std_error: float
    min_singular_value: float
    max_train_residual: float


@dataclass
class DescentCurve:
    records: list = field(default_factory=list)

    @property
    def p(self) -> np.ndarray:
        return np.array([r.p for r in self.records])

    @property
    def mean_ge(self) -> np.ndarray:
        return np.array([r.mean_ge for r in self.records])

    @property
    def std_error(self) -> np.ndarray:
        return np.array([r.std_error for r in self.records])

    @property
    def min_singular_value(self) -> np.ndarray:
        return np.array([r.min_singular_value for r in self.records])

    def to_dict(self) -> dict:
        return {"records": [asdict(r) for r in self.records]}


def draw_problem(spec: DescentSpec, r: int):
    """Design, responses and true coefficients for replicate ``r``."""
    rng = make_rng(replicate_seed(spec.seed, r))
    beta = rng.standard_normal(spec.D)
    beta *= spec.signal_norm / np.linalg.norm(beta)
    X = rng.standard_normal((spec.m, spec.D))
    Y = X @ beta + spec.noise_sd * rng.standard_normal(spec.m)
    return X, Y, beta


def _replicate(spec: DescentSpec, r: int) -> np.ndarray:
    """Rows of (ge, min singular value, relative train residual) per p."""
    X, Y, beta = draw_problem(spec, r)
    out = np.empty((len(spec.p_grid), 3))
    ynorm = np.linalg.norm(Y)
    for j, p in enumerate(spec.p_grid):
        Xp = X[:, :p]
        b = min_norm_lsq(Xp, Y)
        padded = np.zeros(spec.D)
        padded[:p] = b
        s = np.linalg.svd(Xp, compute_uv=False)
        out[j] = (
            float(np.sum((padded - beta) ** 2)),
            float(s[-1]),
            float(np.linalg.norm(Y - Xp @ b) / ynorm),
        )
    return out


def run_descent(spec: DescentSpec, threads: int = 1) -> DescentCurve:
    reps = np.array(_map_replicates(lambda r: _replicate(spec, r), spec.replicates, threads))
    curve = DescentCurve()
    for j, p in enumerate(spec.p_grid):
        mean, se = _mean_se(reps[:, j, 0])
        curve.records.append(
            DescentRecord(
                p=p,
                mean_ge=mean,
                std_error=se,
                min_singular_value=float(reps[:, j, 1].mean()),
                max_train_residual=float(reps[:, j, 2].max()),
            )
        )
    return curve
