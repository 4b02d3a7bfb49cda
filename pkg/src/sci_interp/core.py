"""Shared domain types: datasets, singular weight families, Hölder rate helpers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

# Distances at or below this are treated as exact coincidence with a training point.
COINCIDENCE_TOL = 1e-12


class DegenerateInputWarning(UserWarning):
    """Input is valid but sits at a degenerate edge of an operation's domain."""


class ConsistencyWarning(UserWarning):
    """Parameters fall outside the range where the consistency guarantee holds."""


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Immutable collection of ``n`` points in R^d with real labels.

    Arrays are copied on construction and marked read-only.
    """

    points: np.ndarray
    labels: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dim in (0, 1) else pts.reshape(1, -1)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array of shape (n, d)")
        lab = np.array(self.labels, dtype=float).reshape(-1)
        dim = self.dim or pts.shape[1]
        if pts.shape[1] != dim:
            raise ValueError(f"points have {pts.shape[1]} coordinates, expected dim={dim}")
        if len(pts) != len(lab):
            raise ValueError(f"{len(pts)} points but {len(lab)} labels")
        if len(pts) < 1:
            raise ValueError("dataset must contain at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if not np.all(np.isfinite(lab)):
            raise ValueError("labels must be finite")
        pts.flags.writeable = False
        lab.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "dim", int(dim))

    def __len__(self):
        return len(self.labels)

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.labels == 0.0) | (self.labels == 1.0)))

    def with_labels(self, labels) -> LabeledDataset:
        return LabeledDataset(self.points, labels, self.dim)


@dataclass(frozen=True)
class WeightScheme:
    """Singular weight family: ``power`` with exponent ``delta``, or ``log``.

    Use :meth:`power` and :meth:`log` rather than the raw constructor.
    """

    kind: str
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("power", "log"):
            raise ValueError(f"unknown weight family {self.kind!r}")
        if self.kind == "power" and not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"power weights need 0 < delta, got {self.delta}")
        if self.kind == "log" and self.delta != 0.0:
            raise ValueError("logarithmic weights take no exponent")

    @classmethod
    def power(cls, delta: float) -> WeightScheme:
        return cls("power", float(delta))

    @classmethod
    def log(cls) -> WeightScheme:
        return cls("log")

    @classmethod
    def parse(cls, text) -> WeightScheme:
        """``"log"`` or a positive number (the power exponent)."""
        if isinstance(text, WeightScheme):
            return text
        if isinstance(text, str) and text.strip().lower() in ("log", "logarithmic"):
            return cls.log()
        return cls.power(float(text))

    def check(self, dim: int) -> None:
        """Warn when ``delta >= d/2``; such schemes interpolate but lose the rate guarantee."""
        if self.kind == "power" and self.delta >= dim / 2:
            warnings.warn(
                f"delta={self.delta} >= d/2={dim / 2}: estimator still interpolates "
                "but is not guaranteed consistent",
                ConsistencyWarning,
                stacklevel=2,
            )

    def __str__(self):
        return "log" if self.kind == "log" else f"power({self.delta:g})"


@dataclass(frozen=True)
class HolderParams:
    alpha: float
    dim: int

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError(f"Hölder exponent must lie in (0, 1], got {self.alpha}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")

    @property
    def rate_exponent(self) -> float:
        """Exponent ``2a/(2a+d)`` of the regression excess-risk decay."""
        return 2 * self.alpha / (2 * self.alpha + self.dim)


# below this the squared sum may have lost precision to underflow
_TINY = 1e-150


def distance(a, b) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(pairwise_distances(a[None, :], b)[0])


def pairwise_distances(points: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Euclidean distance from one query to every row of ``points``.

    Every neighbor routine goes through this so that distances computed on
    different paths are bit-identical. Rows whose squared sum underflows or
    overflows are recomputed with max-abs scaling, so distinct points never
    come out at distance zero.
    """
    diff = points - query
    with np.errstate(over="ignore", under="ignore"):
        out = np.sqrt(np.sum(diff**2, axis=-1))
    bad = (out < _TINY) | ~np.isfinite(out)
    if np.any(bad):
        d = diff[bad]
        m = np.max(np.abs(d), axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        out[bad] = (safe * np.sqrt(np.sum((d / safe) ** 2, axis=-1, keepdims=True)))[..., 0]
    return out


def weight(scheme: WeightScheme, r_i: float, r_kplus1: float) -> float:
    if not r_i > 0:
        raise ValueError(f"r_i must be positive, got {r_i}")
    if r_kplus1 < r_i:
        raise ValueError(f"r_kplus1={r_kplus1} is smaller than r_i={r_i}")
    ratio = r_kplus1 / r_i
    if scheme.kind == "log":
        return math.log(ratio)
    return ratio**scheme.delta - 1.0


def weights_array(scheme: WeightScheme, r: np.ndarray, r_kplus1: np.ndarray) -> np.ndarray:
    """Vectorized :func:`weight`; ``r`` has shape (..., k), ``r_kplus1`` shape (..., 1)."""
    ratio = r_kplus1 / r
    if scheme.kind == "log":
        return np.log(ratio)
    return ratio**scheme.delta - 1.0


def log_weights_array(scheme: WeightScheme, r: np.ndarray, r_kplus1: np.ndarray) -> np.ndarray:
    """Natural log of the weights, finite even where the weights themselves overflow.

    Boundary entries (``r == r_kplus1``) give ``-inf``.
    """
    log_ratio = np.log(r_kplus1) - np.log(r)
    with np.errstate(divide="ignore"):
        if scheme.kind == "log":
            return np.log(log_ratio)
        t = scheme.delta * log_ratio
        # log(e^t - 1) = t + log(1 - e^-t)
        return t + np.log(-np.expm1(-t))


def optimal_k(n: int, hp: HolderParams, c: float = 1.0) -> int:
    """Neighborhood size ``round(c * n^(2a/(2a+d)))`` clamped to ``[1, n-1]``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        warnings.warn("n=1 leaves no (k+1)-th neighbor; returning k=1", DegenerateInputWarning, stacklevel=2)
        return 1
    k = int(math.floor(c * n**hp.rate_exponent + 0.5))
    return min(max(k, 1), n - 1)


def samples_needed(epsilon: float, hp: HolderParams) -> float:
    """Sample size for excess risk ``epsilon``: ``(1/eps)^(1 + d/(2a))``."""
    if not (0 < epsilon < 1):
        raise ValueError("epsilon must lie in (0, 1)")
    return (1.0 / epsilon) ** (1.0 + hp.dim / (2.0 * hp.alpha))
