"""Geometric comparison utilities: label-invariant complex equality and a
sampled chamfer distance.  Both are meant for testing and reporting, not
for the hot simplification loop.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .complex import SimplicialComplex


def _canonical_order(c: SimplicialComplex) -> list[int]:
    """Live vertex ids sorted by position with degree tie-breaks."""
    ids = c.vertex_ids()

    def key(v: int):
        p = c.position(v)
        st = c.star(v)
        return (p[0], p[1], p[2], len(st.edges), len(st.triangles))

    return sorted(ids, key=key)


def complex_equal(a: SimplicialComplex, b: SimplicialComplex, tol: float = 0.0) -> bool:
    """True iff some vertex bijection matches positions within ``tol`` per
    coordinate and carries the simplex sets onto each other.

    Decided by canonicalization: vertices sort lexicographically by
    position (ties broken on degree), then the canonicalized simplex sets
    must agree.  Complexes whose same-position vertices differ only in
    deeper structure may canonicalize differently and compare unequal;
    that conservative answer is acceptable for a test utility.
    """
    if a.n_vertices != b.n_vertices or a.n_edges != b.n_edges or a.n_triangles != b.n_triangles:
        return False
    order_a = _canonical_order(a)
    order_b = _canonical_order(b)
    rank_a = {v: i for i, v in enumerate(order_a)}
    rank_b = {v: i for i, v in enumerate(order_b)}
    pos_a = np.array([a.position(v) for v in order_a]) if order_a else np.zeros((0, 3))
    pos_b = np.array([b.position(v) for v in order_b]) if order_b else np.zeros((0, 3))
    if len(pos_a) and np.any(np.abs(pos_a - pos_b) > tol):
        return False

    edges_a = {tuple(sorted((rank_a[u], rank_a[w]))) for u, w in a.edge_tuples()}
    edges_b = {tuple(sorted((rank_b[u], rank_b[w]))) for u, w in b.edge_tuples()}
    if edges_a != edges_b:
        return False
    tris_a = {tuple(sorted(rank_a[v] for v in t)) for t in a.triangle_tuples()}
    tris_b = {tuple(sorted(rank_b[v] for v in t)) for t in b.triangle_tuples()}
    return tris_a == tris_b


def _sample_surface(c: SimplicialComplex, samples: int, seed: int) -> np.ndarray:
    """Deterministic area/length-weighted point samples of a complex.

    Elements are visited in a canonical position-sorted order, so two
    complexes that are complex_equal produce identical sample clouds for
    the same seed.  Isolated points are always included verbatim; a pure
    point cloud is returned as-is.
    """
    tris: list[np.ndarray] = []
    for tid in c.triangle_ids():
        tris.append(np.array([c.position(v) for v in c.triangle(tid)]))
    wires: list[np.ndarray] = []
    for eid in c.edge_ids():
        if c.edge_triangle_count(eid) == 0:
            wires.append(np.array([c.position(v) for v in c.edge(eid)]))
    lone_pts = []
    for v in c.vertex_ids():
        st = c.star(v)
        if not st.edges and not st.triangles:
            lone_pts.append(c.position(v))

    tris.sort(key=lambda t: tuple(np.asarray(t).ravel()))
    wires.sort(key=lambda t: tuple(np.asarray(t).ravel()))
    lone_pts.sort(key=tuple)

    weights = []
    for t in tris:
        weights.append(0.5 * np.linalg.norm(np.cross(t[1] - t[0], t[2] - t[0])))
    for w in wires:
        weights.append(np.linalg.norm(w[1] - w[0]))
    weights_arr = np.asarray(weights, dtype=np.float64)
    total = float(weights_arr.sum()) if len(weights_arr) else 0.0

    out = [np.asarray(lone_pts).reshape(-1, 3)]
    if total > 0.0 and samples > 0:
        rng = np.random.default_rng(seed)
        elems = rng.choice(len(weights_arr), size=samples, p=weights_arr / total)
        r = rng.random((samples, 2))
        pts = np.empty((samples, 3))
        n_tris = len(tris)
        for i, (e, (r1, r2)) in enumerate(zip(elems, r)):
            if e < n_tris:
                if r1 + r2 > 1.0:
                    r1, r2 = 1.0 - r1, 1.0 - r2
                t = tris[e]
                pts[i] = t[0] + r1 * (t[1] - t[0]) + r2 * (t[2] - t[0])
            else:
                w = wires[e - n_tris]
                pts[i] = w[0] + r1 * (w[1] - w[0])
        out.append(pts)
    elif total == 0.0 and not lone_pts:
        # no sampleable measure but vertices exist (all on degenerate
        # simplices): fall back to the vertex set
        out.append(np.array(sorted((tuple(c.position(v)) for v in c.vertex_ids()))))
    return np.concatenate(out, axis=0)


def chamfer_distance(
    a: SimplicialComplex, b: SimplicialComplex, samples: int = 20000, seed: int = 0
) -> float:
    """Symmetric mean closest-point distance between surface samples.

    Identical complexes give exactly 0.0 because the sampling is
    canonical for a fixed seed.
    """
    if a.n_vertices == 0 or b.n_vertices == 0:
        raise ValueError("chamfer_distance of an empty complex")
    pa = _sample_surface(a, samples, seed)
    pb = _sample_surface(b, samples, seed)
    da = cKDTree(pb).query(pa)[0]
    db = cKDTree(pa).query(pb)[0]
    return 0.5 * (float(da.mean()) + float(db.mean()))
