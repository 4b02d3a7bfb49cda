"""Interpolating estimators (wiNN and its precursors) and the kNN baseline.

Every estimator maps a batch of query points ``(m, d)`` to real predictions
via ``predict``. Interpolating estimators share one rule at training points:
a query within ``COINCIDENCE_TOL`` of one or more training points returns the
mean label of those points (exactly the label when they agree).
"""

from __future__ import annotations

import numpy as np

from .core import (
    COINCIDENCE_TOL,
    LabeledDataset,
    WeightScheme,
    log_weights_array,
    pairwise_distances,
    weights_array,
)
from .delaunay import bowyer_watson, delaunay_violations
from .neighbors import NeighborIndex, _as_queries, _nearest_brute, build_index

# Below this ratio r_min / r_(k+1) weights are formed in log space.
LOG_SPACE_RATIO = 1e-9
_CHUNK = 2048


def _coincident_value(labels: np.ndarray) -> float:
    if np.all(labels == labels[0]):
        return float(labels[0])
    return float(np.mean(labels))


def _check_binary(ds: LabeledDataset) -> None:
    if not ds.is_binary:
        raise ValueError("classification requires training labels in {0, 1}")


class Estimator:
    """Base class. Subclasses implement ``predict`` for a batch of queries."""

    interpolating = False
    dataset: LabeledDataset

    def predict(self, queries) -> np.ndarray:
        raise NotImplementedError

    def predict_one(self, query) -> float:
        q = np.asarray(query, dtype=float).reshape(1, -1)
        return float(self.predict(q)[0])

    def classify(self, queries) -> np.ndarray:
        """Plug-in classifier: 1 where the regression estimate is >= 1/2."""
        _check_binary(self.dataset)
        return (self.predict(queries) >= 0.5).astype(np.int8)

    def __call__(self, queries) -> np.ndarray:
        return self.predict(queries)


class WinnEstimator(Estimator):
    """Singularly weighted interpolating nearest neighbors.

    The prediction is the weighted mean of the ``k`` nearest labels with
    weights ``w(r_i) = (r_(k+1)/r_i)^delta - 1`` (power) or
    ``log(r_(k+1)/r_i)`` (log), where ``r_(k+1)`` is the distance to the
    ``(k+1)``-th neighbor. If all ``k`` weights vanish (every neighbor ties
    with ``r_(k+1)``) the plain mean of the ``k`` labels is returned.
    """

    interpolating = True

    def __init__(self, data, k: int, scheme: WeightScheme | str = "log"):
        self.index = data if isinstance(data, NeighborIndex) else build_index(data)
        self.dataset = self.index.dataset
        n = len(self.dataset)
        if not 1 <= k <= n - 1:
            raise ValueError(f"insufficient samples for k+1 neighbors (k={k}, n={n})")
        self.k = int(k)
        self.scheme = WeightScheme.parse(scheme)
        self.scheme.check(self.dataset.dim)

    def predict(self, queries) -> np.ndarray:
        Q = _as_queries(queries, self.dataset.dim)
        out = np.empty(len(Q))
        for s in range(0, len(Q), _CHUNK):
            out[s : s + _CHUNK] = self._predict_chunk(Q[s : s + _CHUNK])
        return out

    def _predict_chunk(self, Q: np.ndarray) -> np.ndarray:
        k = self.k
        labels = self.dataset.labels
        ind, dist = self.index.nearest(Q, k + 1)
        out = np.empty(len(Q))

        hit = dist[:, 0] <= COINCIDENCE_TOL
        for row in np.flatnonzero(hit):
            if dist[row, k] <= COINCIDENCE_TOL:
                members = self.index.within(Q[row], COINCIDENCE_TOL)
            else:
                members = ind[row][dist[row] <= COINCIDENCE_TOL]
            out[row] = _coincident_value(labels[members])

        rest = ~hit
        if not rest.any():
            return out
        r = dist[rest, :k]
        R = dist[rest, k:]
        y = labels[ind[rest, :k]]

        guard = r[:, 0] < LOG_SPACE_RATIO * R[:, 0]
        p = np.empty_like(r)
        plain = ~guard
        if plain.any():
            w = weights_array(self.scheme, r[plain], R[plain])
            p[plain] = w
        if guard.any():
            lw = log_weights_array(self.scheme, r[guard], R[guard])
            p[guard] = np.exp(lw - lw.max(axis=1, keepdims=True))
        total = p.sum(axis=1, keepdims=True)
        flat = total[:, 0] == 0
        p[flat] = 1.0
        total[flat] = k
        p /= total
        out[rest] = np.sum(p * y, axis=1)
        return out


class KnnEstimator(Estimator):
    """Unweighted mean of the ``k`` nearest labels (smooths, does not interpolate)."""

    def __init__(self, data, k: int):
        self.index = data if isinstance(data, NeighborIndex) else build_index(data)
        self.dataset = self.index.dataset
        n = len(self.dataset)
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in [1, n={n}], got {k}")
        self.k = int(k)
        self.interpolating = self.k == 1

    def predict(self, queries) -> np.ndarray:
        Q = _as_queries(queries, self.dataset.dim)
        ind, _ = self.index.nearest(Q, self.k)
        return self.dataset.labels[ind].mean(axis=1)


class OneNNEstimator(Estimator):
    """Label of the nearest training point, ties to the lower index."""

    interpolating = True

    def __init__(self, data):
        self.index = data if isinstance(data, NeighborIndex) else build_index(data)
        self.dataset = self.index.dataset

    def predict(self, queries) -> np.ndarray:
        Q = _as_queries(queries, self.dataset.dim)
        ind, _ = self.index.nearest(Q, 1)
        return self.dataset.labels[ind[:, 0]].copy()


def one_nn_predict(ds: LabeledDataset, query) -> float:
    q = np.asarray(query, dtype=float).reshape(-1)
    if q.shape[0] != ds.dim:
        raise ValueError(f"query has {q.shape[0]} coordinates, dataset dim is {ds.dim}")
    idx, _ = _nearest_brute(ds.points, q, 1)
    return float(ds.labels[idx[0]])


class InverseDistanceEstimator(Estimator):
    """Global inverse-distance weighting, weights ``r_i^(-power)`` over all points."""

    interpolating = True

    def __init__(self, ds: LabeledDataset, power: float):
        if not power > 0:
            raise ValueError(f"exponent must be positive, got {power}")
        self.dataset = ds
        self.power = float(power)

    def predict(self, queries) -> np.ndarray:
        ds = self.dataset
        Q = _as_queries(queries, ds.dim)
        out = np.empty(len(Q))
        for i, q in enumerate(Q):
            d = pairwise_distances(ds.points, q)
            hit = d <= COINCIDENCE_TOL
            if hit.any():
                out[i] = _coincident_value(ds.labels[hit])
                continue
            # weights normalized by the largest, computed in log space
            lw = -self.power * np.log(d)
            w = np.exp(lw - lw.max())
            out[i] = np.dot(w / w.sum(), ds.labels)
        return out


class HilbertEstimator(InverseDistanceEstimator):
    """Hilbert-kernel estimator: inverse-distance weights with exponent ``d``."""

    def __init__(self, ds: LabeledDataset, exponent: float | None = None):
        super().__init__(ds, ds.dim if exponent is None else exponent)

    @property
    def exponent(self) -> float:
        return self.power


class ShepardEstimator(InverseDistanceEstimator):
    """Shepard's inverse-distance interpolation (classical power 2)."""

    def __init__(self, ds: LabeledDataset, power: float = 2.0):
        super().__init__(ds, power)


def _dedupe(ds: LabeledDataset):
    """Unique points (first occurrence order) with the mean label of each group."""
    uniq, first, inverse = np.unique(ds.points, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    pts = uniq[order]
    labels = np.empty(len(pts))
    for g in range(len(pts)):
        labels[g] = _coincident_value(ds.labels[rank[inverse] == g])
    return pts, labels


class SimplexEstimator(Estimator):
    """Piecewise-linear interpolation over a simplicial complex (d = 1 or 2).

    In 1-D the complex is the sorted segment partition; in 2-D it is the
    Delaunay triangulation. Outside the convex hull the value at the nearest
    vertex is returned.
    """

    interpolating = True

    def __init__(self, ds: LabeledDataset):
        if ds.dim not in (1, 2):
            raise ValueError(f"simplex interpolation is implemented for d in {{1, 2}}, got d={ds.dim}")
        self.dataset = ds
        self.vertices, self.values = _dedupe(ds)
        if ds.dim == 1:
            order = np.argsort(self.vertices[:, 0], kind="stable")
            self.vertices = self.vertices[order]
            self.values = self.values[order]
            self.triangles = None
        else:
            self.triangles = bowyer_watson(self.vertices)
            bad = delaunay_violations(self.vertices, self.triangles)
            if bad:
                raise RuntimeError(f"triangulation violates the empty-circumcircle property at {bad[:3]}")
            self._prepare_barycentric()

    def _prepare_barycentric(self):
        V = self.vertices
        a, b, c = V[self.triangles[:, 0]], V[self.triangles[:, 1]], V[self.triangles[:, 2]]
        self._a = a
        self._v0 = b - a
        self._v1 = c - a
        self._den = self._v0[:, 0] * self._v1[:, 1] - self._v1[:, 0] * self._v0[:, 1]

    def predict(self, queries) -> np.ndarray:
        Q = _as_queries(queries, self.dataset.dim)
        out = np.empty(len(Q))
        for i, q in enumerate(Q):
            d = pairwise_distances(self.vertices, q)
            j = int(np.argmin(d))
            if d[j] <= COINCIDENCE_TOL:
                out[i] = self.values[j]
            elif self.triangles is None:
                out[i] = self._segment_value(q[0], j)
            else:
                out[i] = self._triangle_value(q, j)
        return out

    def _segment_value(self, x: float, nearest: int) -> float:
        xs, ys = self.vertices[:, 0], self.values
        if x <= xs[0] or x >= xs[-1]:
            return float(ys[nearest])
        hi = int(np.searchsorted(xs, x, side="right"))
        lo = hi - 1
        t = (x - xs[lo]) / (xs[hi] - xs[lo])
        return float((1.0 - t) * ys[lo] + t * ys[hi])

    def _triangle_value(self, q: np.ndarray, nearest: int) -> float:
        dq = q - self._a
        l1 = (dq[:, 0] * self._v1[:, 1] - self._v1[:, 0] * dq[:, 1]) / self._den
        l2 = (self._v0[:, 0] * dq[:, 1] - dq[:, 0] * self._v0[:, 1]) / self._den
        l0 = 1.0 - l1 - l2
        inside = (l0 >= -1e-12) & (l1 >= -1e-12) & (l2 >= -1e-12)
        hits = np.flatnonzero(inside)
        if len(hits) == 0:
            return float(self.values[nearest])
        t = hits[0]
        lam = np.clip([l0[t], l1[t], l2[t]], 0.0, None)
        lam /= lam.sum()
        return float(np.dot(lam, self.values[self.triangles[t]]))


class LagrangeEstimator(Estimator):
    """Global polynomial interpolation in 1-D, evaluated in barycentric form."""

    interpolating = True

    def __init__(self, nodes, values=None):
        if isinstance(nodes, LabeledDataset):
            if nodes.dim != 1:
                raise ValueError("Lagrange interpolation is 1-D only")
            self.dataset = nodes
            x, y = nodes.points[:, 0], nodes.labels
        else:
            x = np.asarray(nodes, dtype=float).reshape(-1)
            y = np.asarray(values, dtype=float).reshape(-1)
            self.dataset = LabeledDataset(x.reshape(-1, 1), y)
        if len(np.unique(x)) != len(x):
            raise ValueError("Lagrange nodes must be pairwise distinct")
        self.nodes = x.copy()
        self.values = y.copy()
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        self.bary_weights = 1.0 / np.prod(diff, axis=1)

    def predict(self, queries) -> np.ndarray:
        Q = _as_queries(queries, 1)[:, 0]
        out = np.empty(len(Q))
        for i, x in enumerate(Q):
            diff = x - self.nodes
            exact = np.flatnonzero(diff == 0.0)
            if len(exact):
                out[i] = self.values[exact[0]]
                continue
            t = self.bary_weights / diff
            out[i] = np.dot(t, self.values) / t.sum()
        return out


def simplex_build(ds: LabeledDataset) -> SimplexEstimator:
    return SimplexEstimator(ds)


def winn_predict(e: WinnEstimator, query) -> float:
    return e.predict_one(query)


def winn_classify(e: WinnEstimator, query) -> int:
    _check_binary(e.dataset)
    return int(winn_predict(e, query) >= 0.5)
