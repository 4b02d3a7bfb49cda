"""Planar Delaunay triangulation by Bowyer-Watson incremental insertion.

The unbounded exterior is represented by ghost triangles ``(a, b, GHOST)``,
one per directed hull edge ``a -> b`` whose left side is outside the hull.
A point lies in a ghost triangle's "circumdisk" when it is strictly outside
that hull edge (or on its open segment). This removes the need for a large
super-triangle and keeps hull triangles from being lost.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

GHOST = -1

# Relative to a unit-scaled point set.
COLLINEAR_TOL = 1e-12
INCIRCLE_TOL = 1e-9
# Float predicates with magnitude below these are re-evaluated exactly.
_ORIENT_FILTER = 1e-12
_INCIRCLE_FILTER = 1e-10


def orient(a, b, c) -> float:
    """Twice the signed area of ``abc``; positive when counter-clockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def incircle(a, b, c, d) -> float:
    """Positive when ``d`` is strictly inside the circumcircle of CCW triangle ``abc``."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    ad = adx * adx + ady * ady
    bd = bdx * bdx + bdy * bdy
    cd = cdx * cdx + cdy * cdy
    return (
        adx * (bdy * cd - bd * cdy)
        - ady * (bdx * cd - bd * cdx)
        + ad * (bdx * cdy - bdy * cdx)
    )


def _exact(*pts):
    return [(Fraction(x), Fraction(y)) for x, y in pts]


def orient_robust(a, b, c) -> float:
    o = orient(a, b, c)
    if abs(o) > _ORIENT_FILTER:
        return o
    return float(orient(*_exact(a, b, c)))


def incircle_robust(a, b, c, d) -> float:
    v = incircle(a, b, c, d)
    if abs(v) > _INCIRCLE_FILTER:
        return v
    return float(incircle(*_exact(a, b, c, d)))


def _in_ghost(a, b, p) -> bool:
    o = orient_robust(a, b, p)
    if o > 0:
        return True
    if o < 0:
        return False
    # collinear: inside only on the open segment
    a, b, p = _exact(a, b, p)
    t = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])
    return 0 < t < (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2


def _canon(tri):
    """Rotate so the ghost (if any) is last; real triangles start at the min index."""
    a, b, c = tri
    if c == GHOST:
        return tri
    if a == GHOST:
        return (b, c, a)
    if b == GHOST:
        return (c, a, b)
    m = min(tri)
    if m == a:
        return tri
    if m == b:
        return (b, c, a)
    return (c, a, b)


def _normalize(points: np.ndarray) -> np.ndarray:
    lo = points.min(axis=0)
    scale = float(np.max(points.max(axis=0) - lo))
    if scale == 0:
        raise ValueError("all points coincide; no triangle exists")
    # power-of-two scale keeps exactly representable inputs exact
    return (points - lo) / 2.0 ** np.ceil(np.log2(scale))


def bowyer_watson(points) -> np.ndarray:
    """Delaunay triangles of distinct 2-D ``points`` as an ``(T, 3)`` index array.

    Triangles are counter-clockwise. Raises ``ValueError`` if every point is
    collinear.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    n = len(P)
    if n < 3:
        raise ValueError("need at least 3 points to triangulate")
    U = _normalize(P)
    pts = [tuple(p) for p in U.tolist()]

    i0 = 0
    i1 = int(np.argmax(np.sum((U - U[i0]) ** 2, axis=1)))
    areas = np.abs((U[i1, 0] - U[i0, 0]) * (U[:, 1] - U[i0, 1]) - (U[i1, 1] - U[i0, 1]) * (U[:, 0] - U[i0, 0]))
    i2 = int(np.argmax(areas))
    if areas[i2] <= COLLINEAR_TOL:
        raise ValueError("points are collinear; no 2-D triangulation exists")
    if orient_robust(pts[i0], pts[i1], pts[i2]) < 0:
        i1, i2 = i2, i1

    tris = {_canon((i0, i1, i2)), (i1, i0, GHOST), (i2, i1, GHOST), (i0, i2, GHOST)}
    # Insert nearest-to-seed first so cavities stay small.
    seed = (U[i0] + U[i1] + U[i2]) / 3
    order = np.argsort(np.sum((U - seed) ** 2, axis=1), kind="stable")
    for ip in order.tolist():
        if ip in (i0, i1, i2):
            continue
        p = pts[ip]
        bad = []
        for t in tris:
            a, b, c = t
            if c == GHOST:
                if _in_ghost(pts[a], pts[b], p):
                    bad.append(t)
            elif incircle_robust(pts[a], pts[b], pts[c], p) > 0:
                bad.append(t)
        edges = set()
        for a, b, c in bad:
            edges.update(((a, b), (b, c), (c, a)))
        for t in bad:
            tris.discard(t)
        for u, v in edges:
            if (v, u) in edges:
                continue
            tris.add(_canon((u, v, ip)))

    real = sorted(t for t in tris if GHOST not in t)
    return np.array(real, dtype=np.intp).reshape(-1, 3)


def delaunay_violations(points, triangles, tol: float = INCIRCLE_TOL) -> list:
    """Brute-force empty-circumcircle check.

    Returns ``(triangle_row, point_index)`` pairs where a point lies strictly
    inside a triangle's circumcircle by more than ``tol`` (on unit-scaled
    coordinates).
    """
    U = _normalize(np.asarray(points, dtype=float))
    tri = np.asarray(triangles, dtype=np.intp)
    out = []
    for row, (a, b, c) in enumerate(tri):
        A, B, C = U[a], U[b], U[c]
        d = U
        adx, ady = A[0] - d[:, 0], A[1] - d[:, 1]
        bdx, bdy = B[0] - d[:, 0], B[1] - d[:, 1]
        cdx, cdy = C[0] - d[:, 0], C[1] - d[:, 1]
        ad = adx**2 + ady**2
        bd = bdx**2 + bdy**2
        cd = cdx**2 + cdy**2
        det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
        det[[a, b, c]] = 0.0
        for j in np.flatnonzero(det > tol):
            out.append((row, int(j)))
    return out
