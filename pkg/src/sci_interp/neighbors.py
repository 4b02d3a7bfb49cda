"""Exact k-nearest-neighbor search with deterministic lower-index tie-breaking.

``knn_brute`` is the reference. ``NeighborIndex`` answers the same queries
through a median-split KD-tree and then re-ranks candidates with the exact
distance used by the brute-force path, so both agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import LabeledDataset, pairwise_distances

LEAF_SIZE = 16
_EXTRA_CANDIDATES = 8


@dataclass(frozen=True, eq=False)
class NeighborList:
    indices: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return len(self.indices)


def _check_k(n: int, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k >= n:
        raise ValueError(f"insufficient samples for k+1 neighbors (k={k}, n={n})")


def _as_query(query, dim: int) -> np.ndarray:
    q = np.asarray(query, dtype=float).reshape(-1)
    if q.shape[0] != dim:
        raise ValueError(f"query has {q.shape[0]} coordinates, dataset dim is {dim}")
    return q


def _as_queries(queries, dim: int) -> np.ndarray:
    q = np.asarray(queries, dtype=float)
    if q.ndim == 1:
        q = q.reshape(-1, dim) if dim == 1 else q.reshape(1, -1)
    if q.ndim != 2 or q.shape[1] != dim:
        raise ValueError(f"queries must have shape (m, {dim}), got {np.shape(queries)}")
    return q


def _nearest_brute(points: np.ndarray, q: np.ndarray, count: int):
    d = pairwise_distances(points, q)
    order = np.argsort(d, kind="stable")[:count]
    return order, d[order]


def knn_brute(ds: LabeledDataset, query, k: int) -> NeighborList:
    """The ``k+1`` nearest training points to ``query``, ties to the lower index."""
    _check_k(len(ds), k)
    q = _as_query(query, ds.dim)
    idx, dist = _nearest_brute(ds.points, q, k + 1)
    return NeighborList(idx, dist)


class NeighborIndex:
    """Immutable KD-tree over a dataset (median splits on the widest coordinate)."""

    def __init__(self, ds: LabeledDataset):
        self.dataset = ds
        self._tree = cKDTree(ds.points, leafsize=LEAF_SIZE, balanced_tree=True, compact_nodes=False)

    @property
    def size(self) -> int:
        return len(self.dataset)

    @property
    def dim(self) -> int:
        return self.dataset.dim

    def nearest(self, queries, count: int):
        """Indices and distances of the ``count`` nearest points for each query row.

        Returns two arrays of shape ``(m, count)``, sorted by (distance, index).
        """
        n = self.size
        if not 1 <= count <= n:
            raise ValueError(f"cannot return {count} neighbors from {n} points")
        pts = self.dataset.points
        Q = _as_queries(queries, self.dim)
        m = len(Q)
        if m == 0:
            return np.empty((0, count), dtype=np.intp), np.empty((0, count))
        n_cand = min(n, count + _EXTRA_CANDIDATES)
        tree_d, cand = self._tree.query(Q, k=n_cand)
        tree_d = np.asarray(tree_d).reshape(m, n_cand)
        cand = np.asarray(cand, dtype=np.intp).reshape(m, n_cand)

        d = pairwise_distances(pts[cand], Q[:, None, :])
        order = np.lexsort((cand, d), axis=-1)
        cand = np.take_along_axis(cand, order, axis=-1)[:, :count]
        d = np.take_along_axis(d, order, axis=-1)[:, :count]
        if n_cand == n:
            return cand, d

        # A point outside the candidate set is at least as far as the last
        # candidate; re-search only rows where a tie could hide behind it.
        unsafe = ~(d[:, -1] < tree_d[:, -1] * (1.0 - 1e-12))
        for row in np.flatnonzero(unsafe):
            radius = d[row, -1] * (1.0 + 1e-9) + 1e-300
            ball = np.asarray(self._tree.query_ball_point(Q[row], radius), dtype=np.intp)
            bd = pairwise_distances(pts[ball], Q[row])
            o = np.lexsort((ball, bd))[:count]
            cand[row] = ball[o]
            d[row] = bd[o]
        return cand, d

    def within(self, query, radius: float) -> np.ndarray:
        """Sorted indices of all points with exact distance ``<= radius``."""
        q = _as_query(query, self.dim)
        ball = np.asarray(self._tree.query_ball_point(q, radius * (1.0 + 1e-9) + 1e-300), dtype=np.intp)
        bd = pairwise_distances(self.dataset.points[ball], q)
        return np.sort(ball[bd <= radius])


def build_index(ds: LabeledDataset) -> NeighborIndex:
    return NeighborIndex(ds)


def knn_query(idx: NeighborIndex, query, k: int) -> NeighborList:
    """Same contract as :func:`knn_brute`, answered through the index."""
    _check_k(idx.size, k)
    q = _as_query(query, idx.dim)
    ind, dist = idx.nearest(q[None, :], k + 1)
    return NeighborList(ind[0], dist[0])


def knn_query_many(idx: NeighborIndex, queries, k: int):
    """Batched :func:`knn_query`: arrays of shape ``(m, k+1)``."""
    _check_k(idx.size, k)
    return idx.nearest(queries, k + 1)
