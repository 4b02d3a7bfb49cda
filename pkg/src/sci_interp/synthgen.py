"""Seeded synthetic data: 1-D noisy regression, two Gaussian classes, Hölder targets.

All randomness comes from Philox (counter-based) streams keyed by
``(seed, stream)``, so a spec plus seed always yields the same arrays.
Replicate ``r`` of a spec uses ``seed ^ (r * REPLICATE_MIX mod 2^64)``; the
multiplier keeps replicate sets of nearby seeds disjoint.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import expit, ndtr

from .core import LabeledDataset

TRAIN_STREAM = 0
TEST_STREAM = 1
_U64 = (1 << 64) - 1
REPLICATE_MIX = 0x9E3779B97F4A7C15


def replicate_seed(seed: int, r: int) -> int:
    return (int(seed) ^ (int(r) * REPLICATE_MIX)) & _U64


def make_rng(seed: int, stream: int = TRAIN_STREAM) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([int(seed) & _U64, int(stream) & _U64], dtype=np.uint64)))


class _Spec:
    seed: int
    n: int

    def replicate(self, r: int):
        return dataclasses.replace(self, seed=replicate_seed(self.seed, r))

    def with_n(self, n: int):
        return dataclasses.replace(self, n=int(n))

    def _check_n(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0 <= int(self.seed) <= _U64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class Fig1Regression(_Spec):
    """``y = x + N(0, 1)`` with ``x ~ U[0, 1]``."""

    n: int = 50
    seed: int = 0

    def __post_init__(self):
        self._check_n()


@dataclass(frozen=True)
class Fig2Gaussians(_Spec):
    """Balanced classes: label 1 ~ N((separation, 0), I), label 0 ~ N((0, 0), I).

    Each label is then flipped independently with probability ``flip_prob``.
    """

    n: int = 50
    flip_prob: float = 0.0
    separation: float = 2.0
    seed: int = 0

    def __post_init__(self):
        self._check_n()
        if not 0 <= self.flip_prob < 0.5:
            raise ValueError(f"flip_prob must lie in [0, 1/2), got {self.flip_prob}")
        if not self.separation >= 0:
            raise ValueError("separation must be nonnegative")


@dataclass(frozen=True)
class HolderTarget:
    name: str
    alpha: float
    fn: Callable[[np.ndarray], np.ndarray]


def _coordinate_mean(f):
    return lambda X: f(np.asarray(X, dtype=float)).mean(axis=1)


HOLDER_TARGETS = {
    "linear": HolderTarget("linear", 1.0, _coordinate_mean(lambda X: X)),
    "kink": HolderTarget("kink", 1.0, _coordinate_mean(lambda X: np.abs(X - 0.5))),
    "sqrt": HolderTarget("sqrt", 0.5, _coordinate_mean(lambda X: np.sqrt(np.clip(X, 0.0, None)))),
    "sine": HolderTarget("sine", 1.0, _coordinate_mean(lambda X: np.sin(2 * np.pi * X))),
}


@dataclass(frozen=True)
class HolderRegression(_Spec):
    """``y = eta(x) + N(0, noise_sd^2)`` with ``x ~ U[0,1]^dim``.

    ``eta`` is the coordinate-mean of a catalog function (see
    ``HOLDER_TARGETS``), which keeps the target's Hölder exponent.
    """

    n: int = 100
    dim: int = 1
    alpha: float = 1.0
    noise_sd: float = 1.0
    target_id: str = "linear"
    seed: int = 0

    def __post_init__(self):
        self._check_n()
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.noise_sd >= 0:
            raise ValueError("noise_sd must be nonnegative")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.target_id not in HOLDER_TARGETS:
            raise ValueError(f"unknown target_id {self.target_id!r}; choose from {sorted(HOLDER_TARGETS)}")


GeneratorSpec = Union[Fig1Regression, Fig2Gaussians, HolderRegression]


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Population-level facts about a generator.

    ``sample(m, rng)`` draws fresh ``(X, y)`` pairs from the same joint law
    as the training data. ``clean_labels`` / ``flipped`` are set only for the
    Gaussian classification family.
    """

    eta: Callable[[np.ndarray], np.ndarray]
    sample: Callable[[int, np.random.Generator], tuple]
    dim: int
    bayes_label: Optional[Callable[[np.ndarray], np.ndarray]] = None
    bayes_risk: Optional[float] = None
    bayes_boundary_x1: Optional[float] = None
    clean_labels: Optional[np.ndarray] = None
    flipped: Optional[np.ndarray] = None


def bayes_risk_two_gaussians(separation: float, flip_prob: float) -> float:
    """0/1 risk of the Bayes rule for two unit-variance Gaussians with label flips.

    The clean-label error of the rule ``[x1 >= s/2]`` is ``e = Phi(-s/2)``;
    an independent flip with probability ``f`` turns it into
    ``e (1 - f) + (1 - e) f``.
    """
    if separation < 0:
        raise ValueError("separation must be nonnegative")
    if math.isinf(separation):
        return float(flip_prob)
    e = float(ndtr(-separation / 2.0))
    return e * (1.0 - 2.0 * flip_prob) + flip_prob


def _fig1_sample(m, rng):
    x = rng.uniform(0.0, 1.0, size=(m, 1))
    y = x[:, 0] + rng.standard_normal(m)
    return x, y


def _gaussians_sample(spec: Fig2Gaussians):
    s, f = spec.separation, spec.flip_prob

    def draw(m, rng):
        clean = (rng.uniform(size=m) < 0.5).astype(float)
        X = rng.standard_normal((m, 2))
        X[:, 0] += s * clean
        flip = rng.uniform(size=m) < f
        y = np.where(flip, 1.0 - clean, clean)
        return X, y, clean, flip

    return draw


def _holder_sample(spec: HolderRegression):
    fn = HOLDER_TARGETS[spec.target_id].fn

    def draw(m, rng):
        X = rng.uniform(0.0, 1.0, size=(m, spec.dim))
        y = fn(X)
        if spec.noise_sd > 0:
            y = y + spec.noise_sd * rng.standard_normal(m)
        return X, y

    return draw


def generate(spec: GeneratorSpec):
    """Training dataset and ground truth for ``spec`` (deterministic in the seed)."""
    rng = make_rng(spec.seed, TRAIN_STREAM)
    if isinstance(spec, Fig1Regression):
        X, y = _fig1_sample(spec.n, rng)
        truth = GroundTruth(eta=lambda X: np.asarray(X, dtype=float)[:, 0].copy(), sample=_fig1_sample, dim=1)
        return LabeledDataset(X, y), truth
    if isinstance(spec, Fig2Gaussians):
        draw = _gaussians_sample(spec)
        X, y, clean, flip = draw(spec.n, rng)
        s, f = spec.separation, spec.flip_prob

        def eta(Z):
            Z = np.asarray(Z, dtype=float)
            return f + (1.0 - 2.0 * f) * expit(s * Z[:, 0] - s * s / 2.0)

        truth = GroundTruth(
            eta=eta,
            sample=lambda m, g: draw(m, g)[:2],
            dim=2,
            bayes_label=lambda Z: (np.asarray(Z, dtype=float)[:, 0] >= s / 2.0).astype(np.int8),
            bayes_risk=bayes_risk_two_gaussians(s, f),
            bayes_boundary_x1=s / 2.0,
            clean_labels=clean,
            flipped=flip,
        )
        return LabeledDataset(X, y), truth
    if isinstance(spec, HolderRegression):
        draw = _holder_sample(spec)
        X, y = draw(spec.n, rng)
        truth = GroundTruth(eta=HOLDER_TARGETS[spec.target_id].fn, sample=draw, dim=spec.dim)
        return LabeledDataset(X, y), truth
    raise TypeError(f"unknown generator spec {type(spec).__name__}")
