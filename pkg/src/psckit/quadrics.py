"""Quadric error functionals for simplices of dimension 0-2.

A quadric is the triplet (A, b, c) with Q(x) = x'Ax + 2b'x + c.  For a
simplex it measures squared distance to the simplex's affine hull, built
from the tangent orthonormal basis: A = I - sum_i e_i e_i'.  Quadrics add
componentwise, which is what makes greedy accumulation over collapses
work.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .complex import SimplicialComplex

_I3 = np.eye(3)


@dataclasses.dataclass(frozen=True)
class Quadric:
    """Quadratic error functional Q(x) = x'Ax + 2b'x + c."""

    A: np.ndarray
    b: np.ndarray
    c: float

    @staticmethod
    def zero() -> "Quadric":
        return Quadric(np.zeros((3, 3)), np.zeros(3), 0.0)

    def __add__(self, other: "Quadric") -> "Quadric":
        return Quadric(self.A + other.A, self.b + other.b, self.c + other.c)

    def scaled(self, w: float) -> "Quadric":
        return Quadric(w * self.A, w * self.b, w * self.c)

    def eval(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(x @ (self.A @ x) + 2.0 * (self.b @ x) + self.c)


@dataclasses.dataclass(frozen=True)
class PenaltyConfig:
    """Aggregation weights for vertex, boundary/isolated-edge and face
    quadrics.  The stock configuration is (0, 1, 1)."""

    w_vertex: float = 0.0
    w_boundary_edge: float = 1.0
    w_face: float = 1.0

    def __post_init__(self) -> None:
        for name in ("w_vertex", "w_boundary_edge", "w_face"):
            w = getattr(self, name)
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {w}")


def fundamental_quadric(points) -> Quadric:
    """Quadric of a point, edge or triangle given its 1-3 vertex positions.

    Degenerate triangles fall back to the quadric of their affine hull
    (an edge direction, or a single point when everything coincides), so
    the result is always positive semidefinite.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[0] not in (1, 2, 3) or pts.shape[1] != 3:
        raise ValueError(f"expected 1-3 points of dimension 3, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite point coordinates")

    p = pts.mean(axis=0)
    basis = _tangent_basis(pts)
    A = _I3.copy()
    for e in basis:
        A = A - np.outer(e, e)
    A = 0.5 * (A + A.T)
    b = -(A @ p)
    c = float(p @ (A @ p))
    return Quadric(A, b, c)


def _tangent_basis(pts: np.ndarray) -> list[np.ndarray]:
    """Orthonormal basis of the affine hull via Gram-Schmidt on edge
    vectors, dropping directions that vanish within rounding."""
    if len(pts) == 1:
        return []
    d1 = pts[1] - pts[0]
    n1 = np.linalg.norm(d1)
    if len(pts) == 2:
        return [] if n1 == 0.0 else [d1 / n1]
    d2 = pts[2] - pts[0]
    n2 = np.linalg.norm(d2)
    if n1 == 0.0:
        d1, n1 = d2, n2
        d2, n2 = np.zeros(3), 0.0
    if n1 == 0.0:
        return []
    e1 = d1 / n1
    u = d2 - (e1 @ d2) * e1
    nu = np.linalg.norm(u)
    if nu <= 1e-12 * max(n1, n2):
        return [e1]
    return [e1, u / nu]


def quadric_eval(q: Quadric, x) -> float:
    return q.eval(x)


def edge_collapse_quadric(q1: Quadric, q2: Quadric) -> Quadric:
    """Quadric of a collapse pair: componentwise sum of the endpoint
    quadrics."""
    return q1 + q2


def _simplex_quadric(c: SimplicialComplex, verts: tuple[int, ...]) -> Quadric:
    return fundamental_quadric([c.position(v) for v in verts])


def aggregate_vertex_quadric(
    c: SimplicialComplex, v: int, pc: PenaltyConfig = PenaltyConfig()
) -> Quadric:
    """Weighted sum of the fundamental quadrics around a vertex.

    Faces always contribute; edges contribute only when they are boundary
    (one incident triangle) or isolated wires (none), so interior edges
    add nothing directly; the vertex's own point quadric is scaled by the
    vertex weight.  Terms are added in a fixed order (vertex, triangles
    ascending, edges ascending) so repeated calls are bitwise identical.
    """
    st = c.star(v)
    q = fundamental_quadric(c.position(v)).scaled(pc.w_vertex)
    for tid in st.triangles:
        q = q + _simplex_quadric(c, c.triangle(tid)).scaled(pc.w_face)
    for eid in st.edges:
        if c.edge_triangle_count(eid) <= 1:
            q = q + _simplex_quadric(c, c.edge(eid)).scaled(pc.w_boundary_edge)
    return q


def _ulp_neighborhood(x0: float, limit: int):
    yield x0
    up = down = x0
    for _ in range(limit):
        up = math.nextafter(up, math.inf)
        yield up
        down = math.nextafter(down, -math.inf)
        yield down


def reachable_midpoint(p1, p2) -> np.ndarray | None:
    """Point within a few ulps of the midpoint of p1 and p2 from which a
    vertex split can reproduce both endpoints bit for bit.

    Per coordinate there must be a float x with fl(m - x) == a and
    fl(m + x) == b.  For roughly a third of real-valued pairs no such
    (m, x) exists anywhere near the true midpoint (the grids of m and x
    are too coarse to satisfy both roundings), in which case this returns
    None and the collapse must sit on an endpoint instead.
    """
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    out = np.empty(3)
    for i in range(3):
        a, b = float(p1[i]), float(p2[i])
        m0 = 0.5 * (a + b)
        x0 = 0.5 * (b - a)
        if m0 - x0 == a and m0 + x0 == b:
            out[i] = m0
            continue
        found = False
        for m in _ulp_neighborhood(m0, 8):
            for x in _ulp_neighborhood(x0, 8):
                if m - x == a and m + x == b:
                    out[i] = m
                    found = True
                    break
            if found:
                break
        if not found:
            return None
    return out


def optimal_placement_choice(qe: Quadric, p1, p2) -> tuple[int, np.ndarray, float]:
    """Like :func:`optimal_placement` but also says which candidate won:
    0 keeps p1, 1 keeps p2, 2 takes the midpoint."""
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    candidates = (p1, p2, 0.5 * (p1 + p2))
    costs = (qe.eval(candidates[0]), qe.eval(candidates[1]), qe.eval(candidates[2]))
    best = 0
    if costs[1] < costs[best]:
        best = 1
    if costs[2] < costs[best]:
        best = 2
    if best == 2:
        mid = reachable_midpoint(p1, p2)
        if mid is None:
            best = 0 if costs[0] <= costs[1] else 1
        else:
            return 2, mid, costs[2]
    return best, candidates[best].copy(), costs[best]


def optimal_placement(qe: Quadric, p1, p2) -> tuple[np.ndarray, float]:
    """Pick the cheapest of {p1, p2, midpoint} under ``qe``.

    Ties resolve in the order (p1, p2, midpoint).  A winning midpoint is
    nudged onto the nearest split-reproducible point (a few ulps); pairs
    whose midpoint cannot be reproduced exactly by any vertex split fall
    back to the cheaper endpoint, so collapse logs always reverse without
    position loss.
    """
    _, point, cost = optimal_placement_choice(qe, p1, p2)
    return point, cost
