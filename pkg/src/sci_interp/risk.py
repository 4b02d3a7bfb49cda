"""Monte Carlo excess risk, log-log rate fits, and the headline comparisons.

Replicate ``r`` always trains on ``generate(spec.replicate(r))`` and tests on
the TEST_STREAM of the same seed, so results do not depend on the thread
count and paired comparisons share their random numbers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import HolderParams, WeightScheme, optimal_k
from .estimators import KnnEstimator, OneNNEstimator, WinnEstimator
from .synthgen import TEST_STREAM, generate, make_rng

DEFAULT_REPLICATES = 50
DEFAULT_N_TEST = 2000


def _map_replicates(fn, replicates: int, threads: int = 1) -> list:
    if threads is None or threads <= 1 or replicates == 1:
        return [fn(r) for r in range(replicates)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(replicates)))


def _mean_se(values) -> tuple:
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return float(v.mean()), 0.0
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


def _as_predictor(model):
    return model.predict if hasattr(model, "predict") else model


def _as_classifier(model):
    return model.classify if hasattr(model, "classify") else model


def winn_builder(k="auto", scheme="log", alpha: float = 1.0, c: float = 1.0):
    """Factory ``dataset -> WinnEstimator``; ``k="auto"`` uses :func:`optimal_k`."""
    scheme = WeightScheme.parse(scheme)

    def build(ds):
        kk = optimal_k(len(ds), HolderParams(alpha, ds.dim), c) if k == "auto" else int(k)
        return WinnEstimator(ds, kk, scheme)

    return build


def knn_builder(k="auto", alpha: float = 1.0, c: float = 1.0):
    def build(ds):
        kk = optimal_k(len(ds), HolderParams(alpha, ds.dim), c) if k == "auto" else int(k)
        return KnnEstimator(ds, kk)

    return build


def one_nn_builder():
    return OneNNEstimator


def regression_errors(builder, spec, n_test=DEFAULT_N_TEST, replicates=DEFAULT_REPLICATES, threads=1) -> np.ndarray:
    """Per-replicate mean squared deviation from the true regression function."""

    def one(r):
        s = spec.replicate(r)
        ds, truth = generate(s)
        predict = _as_predictor(builder(ds))
        X, _ = truth.sample(n_test, make_rng(s.seed, TEST_STREAM))
        return float(np.mean((predict(X) - truth.eta(X)) ** 2))

    return np.array(_map_replicates(one, replicates, threads))


def excess_risk_regression(builder, spec, n_test=DEFAULT_N_TEST, replicates=DEFAULT_REPLICATES, threads=1):
    """``(mean, std_error)`` of ``E[(eta_hat(x) - eta(x))^2]`` over replicates."""
    return _mean_se(regression_errors(builder, spec, n_test, replicates, threads))


def classification_errors(builder, spec, n_test=DEFAULT_N_TEST, replicates=DEFAULT_REPLICATES, threads=1) -> np.ndarray:
    """Per-replicate 0/1 test error on fresh noisy labels (total risk, not excess)."""

    def one(r):
        s = spec.replicate(r)
        ds, truth = generate(s)
        if truth.bayes_risk is None:
            raise ValueError("generator has no Bayes classifier")
        classify = _as_classifier(builder(ds))
        X, y = truth.sample(n_test, make_rng(s.seed, TEST_STREAM))
        return float(np.mean(np.asarray(classify(X)) != y))

    return np.array(_map_replicates(one, replicates, threads))


def excess_risk_classification(builder, spec, n_test=DEFAULT_N_TEST, replicates=DEFAULT_REPLICATES, threads=1):
    """``(mean, std_error)`` of test 0/1 error minus the Bayes risk."""
    _, truth = generate(spec)
    errs = classification_errors(builder, spec, n_test, replicates, threads)
    return _mean_se(errs - truth.bayes_risk)


@dataclass
class RiskRecord:
    n: int
    mean_excess_risk: float
    std_error: float
    replicates: int


@dataclass
class RiskReport:
    records: list = field(default_factory=list)
    fitted_rate: float = float("nan")
    rate_ci: float = float("nan")

    @property
    def n_values(self) -> np.ndarray:
        return np.array([r.n for r in self.records])

    @property
    def risks(self) -> np.ndarray:
        return np.array([r.mean_excess_risk for r in self.records])

    def to_dict(self) -> dict:
        return {
            "records": [asdict(r) for r in self.records],
            "fitted_rate": self.fitted_rate,
            "rate_ci": self.rate_ci,
        }


def fit_rate(report_or_n, risks=None) -> tuple:
    """OLS slope of log(risk) on log(n) and its 95% half-width (1.96 standard errors)."""
    if isinstance(report_or_n, RiskReport):
        n, risk = report_or_n.n_values, report_or_n.risks
    else:
        n, risk = np.asarray(report_or_n, dtype=float), np.asarray(risks, dtype=float)
    n = np.asarray(n, dtype=float)
    if len(np.unique(n)) < 4:
        raise ValueError("need at least 4 distinct sample sizes")
    if np.log10(n.max() / n.min()) < 2 - 1e-9:
        raise ValueError("sample sizes must span at least two decades")
    if np.any(~(risk > 0)):
        raise ValueError("rate undefined; increase replicates")
    x, y = np.log(n), np.log(risk)
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    slope = float(np.dot(xc, y - y.mean()) / sxx)
    intercept = y.mean() - slope * x.mean()
    dof = len(x) - 2
    if dof <= 0:
        return slope, float("nan")
    resid = y - (intercept + slope * x)
    se = math.sqrt(float(np.dot(resid, resid)) / dof / sxx)
    return slope, 1.96 * se


def rate_sweep(builder, spec, n_values, n_test=DEFAULT_N_TEST, replicates=DEFAULT_REPLICATES, threads=1) -> RiskReport:
    """Regression excess risk at each ``n`` plus the fitted log-log slope."""
    n_values = [int(n) for n in n_values]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n values must be strictly increasing")
    report = RiskReport()
    for n in n_values:
        mean, se = excess_risk_regression(builder, spec.with_n(n), n_test, replicates, threads)
        report.records.append(RiskRecord(n, mean, se, replicates))
    report.fitted_rate, report.rate_ci = fit_rate(report)
    return report


@dataclass
class PairedComparison:
    winn_mean: float
    winn_se: float
    knn_mean: float
    knn_se: float
    diff_mean: float
    diff_se: float
    winn_train_error: float
    knn_train_error: float
    k: int
    replicates: int


def winn_vs_knn(spec, n, k, scheme="log", n_test=DEFAULT_N_TEST, replicates=DEFAULT_REPLICATES, threads=1):
    """Paired excess risks of wiNN and kNN on shared train/test draws.

    ``diff`` is wiNN minus kNN. The train errors are mean squared residuals at
    the training points (zero for an interpolating estimator).
    """
    scheme = WeightScheme.parse(scheme)
    spec = spec.with_n(n)

    def one(r):
        s = spec.replicate(r)
        ds, truth = generate(s)
        w = WinnEstimator(ds, k, scheme)
        kn = KnnEstimator(w.index, k)
        X, _ = truth.sample(n_test, make_rng(s.seed, TEST_STREAM))
        eta = truth.eta(X)
        ew = float(np.mean((w.predict(X) - eta) ** 2))
        ek = float(np.mean((kn.predict(X) - eta) ** 2))
        tw = float(np.mean((w.predict(ds.points) - ds.labels) ** 2))
        tk = float(np.mean((kn.predict(ds.points) - ds.labels) ** 2))
        return ew, ek, tw, tk

    rows = np.array(_map_replicates(one, replicates, threads))
    wm, wse = _mean_se(rows[:, 0])
    km, kse = _mean_se(rows[:, 1])
    dm, dse = _mean_se(rows[:, 0] - rows[:, 1])
    return PairedComparison(wm, wse, km, kse, dm, dse, float(rows[:, 2].mean()), float(rows[:, 3].mean()), int(k), replicates)


N_RAYS = 16
BISECTION_TOL = 1e-6


class NotAnIsland(ValueError):
    pass


def ray_directions(dim: int, n_rays: int = N_RAYS) -> np.ndarray:
    """Fixed unit directions: evenly spaced angles in 2-D, a fixed draw otherwise."""
    if dim == 1:
        return np.array([[1.0], [-1.0]] * (n_rays // 2))
    if dim == 2:
        t = 2 * np.pi * np.arange(n_rays) / n_rays
        return np.column_stack([np.cos(t), np.sin(t)])
    u = make_rng(0, 0).standard_normal((n_rays, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def island_radius(classifier, point, bayes_label, max_radius: float, tol: float = BISECTION_TOL) -> float:
    """Median over 16 rays of the distance where ``classifier`` first matches ``bayes_label``.

    ``classifier`` maps an ``(m, d)`` array to labels. Each ray is bisected on
    ``[0, max_radius]`` to ``tol``. Rays that still disagree at
    ``max_radius`` count as ``max_radius``; if they are the majority,
    :class:`NotAnIsland` is raised.
    """
    classify = _as_classifier(classifier)
    p = np.asarray(point, dtype=float).reshape(-1)
    if int(np.asarray(classify(p[None, :]))[0]) == int(bayes_label):
        raise NotAnIsland("classifier agrees with the Bayes label at the point; no island")
    U = ray_directions(len(p))
    far = np.asarray(classify(p + max_radius * U)) == bayes_label
    if np.count_nonzero(~far) > len(U) / 2:
        raise NotAnIsland("not an island at this scale")
    lo = np.zeros(len(U))
    hi = np.full(len(U), float(max_radius))
    active = far.copy()
    while np.any(active & (hi - lo > tol)):
        mid = 0.5 * (lo + hi)
        agree = np.asarray(classify(p + mid[:, None] * U)) == bayes_label
        step = active & (hi - lo > tol)
        hi = np.where(step & agree, mid, hi)
        lo = np.where(step & ~agree, mid, lo)
    return float(np.median(hi))


@dataclass
class IslandStats:
    radii: np.ndarray
    n_mislabeled: int
    n_candidates: int
    n_skipped: int
    self_misclassified: bool

    @property
    def median(self) -> float:
        return float(np.median(self.radii)) if len(self.radii) else float("nan")


def island_radii(spec, k="auto", scheme="log", alpha=1.0, max_radius=1.0, max_points=None) -> IslandStats:
    """Island radii around the mislabeled points of one Gaussian-classes dataset.

    Candidates are flipped points whose training label differs from the
    Bayes label at their location (a flip on the wrong side of the boundary
    restores agreement and leaves no island). Candidates whose island
    exceeds ``max_radius`` are counted in ``n_skipped``.
    ``self_misclassified`` records whether the classifier returns the
    flipped training label at every mislabeled point.
    """
    ds, truth = generate(spec)
    est = winn_builder(k, scheme, alpha)(ds)
    flipped = np.flatnonzero(truth.flipped)
    at_points = est.classify(ds.points[flipped]) if len(flipped) else np.empty(0)
    self_wrong = bool(np.all(at_points == ds.labels[flipped]) and np.all(ds.labels[flipped] != truth.clean_labels[flipped]))
    bayes = truth.bayes_label(ds.points)
    candidates = [i for i in flipped if ds.labels[i] != bayes[i]]
    if max_points is not None:
        candidates = candidates[:max_points]
    radii, skipped = [], 0
    for i in candidates:
        try:
            radii.append(island_radius(est, ds.points[i], bayes[i], max_radius))
        except NotAnIsland:
            skipped += 1
    return IslandStats(np.array(radii), len(flipped), len(candidates), skipped, self_wrong)
