"""Candidate virtual edges from a 3D Delaunay tetrahedralization.

Virtual edges bridge disconnected components so simplification can merge
topology.  Degenerate point sets are handled by rank reduction: coplanar
inputs fall back to a 2D triangulation in their plane, collinear inputs
to a sorted chain, and coincident points to a star around the first
occurrence.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import Delaunay, QhullError, cKDTree

Pair = tuple[int, int]


def _edges_of_simplices(simplices: np.ndarray) -> set[Pair]:
    edges: set[Pair] = set()
    k = simplices.shape[1]
    for simp in simplices:
        for i in range(k):
            for j in range(i + 1, k):
                a, b = int(simp[i]), int(simp[j])
                edges.add((a, b) if a < b else (b, a))
    return edges


def _all_pairs(n: int) -> set[Pair]:
    return {(i, j) for i in range(n) for j in range(i + 1, n)}


def delaunay_virtual_edges(positions) -> set[Pair]:
    """Edge set of a Delaunay tetrahedralization of the given points.

    Exact duplicate points are chained to their first occurrence rather
    than fed to the triangulation.  Point sets of affine rank below 3 are
    triangulated in their own hull (plane, line, or point).  For four or
    fewer distinct points in general position every pair is returned.
    """
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise ValueError(f"positions must be (n, 3), got {pos.shape}")
    n = len(pos)
    if n == 0:
        raise ValueError("no points")
    if not np.all(np.isfinite(pos)):
        raise ValueError("non-finite coordinates")

    rep_of: dict[bytes, int] = {}
    reps: list[int] = []
    dup_pairs: set[Pair] = set()
    for i in range(n):
        key = pos[i].tobytes()
        r = rep_of.get(key)
        if r is None:
            rep_of[key] = i
            reps.append(i)
        else:
            dup_pairs.add((r, i))

    upos = pos[reps]
    m = len(reps)
    if m == 1:
        return dup_pairs

    centered = upos - upos.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    scale = sv[0]
    rank = int(np.sum(sv > 1e-12 * max(scale, 1e-300)))

    if rank <= 1:
        axis = np.linalg.svd(centered, compute_uv=True)[2][0]
        order = np.argsort(centered @ axis, kind="stable")
        local = {(min(int(order[i]), int(order[i + 1])), max(int(order[i]), int(order[i + 1])))
                 for i in range(m - 1)}
    elif rank == 2 and m >= 4:
        basis = np.linalg.svd(centered, compute_uv=True)[2][:2]
        flat = centered @ basis.T
        try:
            local = _edges_of_simplices(Delaunay(flat).simplices)
        except QhullError:
            local = _all_pairs(m)
    elif m <= 4:
        local = _all_pairs(m)
    else:
        try:
            local = _edges_of_simplices(Delaunay(upos).simplices)
        except QhullError:
            try:
                local = _edges_of_simplices(Delaunay(upos, qhull_options="QJ").simplices)
            except QhullError:
                local = _all_pairs(m)

    edges = {(min(reps[a], reps[b]), max(reps[a], reps[b])) for a, b in local}
    edges |= dup_pairs
    return edges


def knn_pairs(positions, k: int = 8) -> set[Pair]:
    """Symmetrized k-nearest-neighbor pairs; a robustness fallback when
    the Delaunay construction is disabled."""
    pos = np.asarray(positions, dtype=np.float64)
    n = len(pos)
    if n <= 1:
        return set()
    kq = min(k + 1, n)
    _, idx = cKDTree(pos).query(pos, k=kq)
    pairs: set[Pair] = set()
    for i in range(n):
        row = np.atleast_1d(idx[i])
        for j in row:
            j = int(j)
            if j != i:
                pairs.add((min(i, j), max(i, j)))
    return pairs
