"""Simplicial complex data model: points, edges and triangles closed under
taking sub-simplices, with stable per-dimension integer ids.

Vertices are rows of a position array and never renumber. Edges and
triangles are stored as sorted vertex tuples with dense ids assigned at
build time; mutations retire ids (deletions) or rewrite tuples in place
(reconnections) but never reuse an id.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Sequence

import numpy as np

_GROW = 1.5


@dataclasses.dataclass(frozen=True)
class Star:
    """All simplices incident to one vertex, id lists sorted ascending."""

    vertex: int
    edges: tuple[int, ...]
    triangles: tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class EdgeKind:
    """Triangle-incidence classification of an edge.

    Truth value equals ``boundary`` so the result still reads naturally in
    a boolean context.
    """

    boundary: bool
    isolated: bool

    def __bool__(self) -> bool:
        return self.boundary


class SimplicialComplex:
    """Mutable simplicial complex of dimension <= 2.

    Positions are float64. A vertex may be dead (removed by an edge
    collapse); dead vertices keep their index but are excluded from all
    queries. Edge and triangle tuples are always stored sorted.
    """

    def __init__(self) -> None:
        self._pos = np.empty((8, 3), dtype=np.float64)
        self._nv = 0
        self._alive: list[bool] = []
        self._edge_tuple: dict[int, tuple[int, int]] = {}
        self._edge_id: dict[tuple[int, int], int] = {}
        self._tri_tuple: dict[int, tuple[int, int, int]] = {}
        self._tri_id: dict[tuple[int, int, int], int] = {}
        self._v_edges: list[set[int]] = []
        self._v_tris: list[set[int]] = []
        self._next_eid = 0
        self._next_tid = 0

    # -- vertices ---------------------------------------------------------

    @property
    def vertex_capacity(self) -> int:
        """Number of vertex slots ever allocated, including dead ones."""
        return self._nv

    @property
    def n_vertices(self) -> int:
        return sum(self._alive)

    def vertex_ids(self) -> list[int]:
        return [v for v in range(self._nv) if self._alive[v]]

    def is_alive(self, v: int) -> bool:
        return 0 <= v < self._nv and self._alive[v]

    def position(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        return self._pos[v].copy()

    @property
    def positions(self) -> np.ndarray:
        """Positions of live vertices, in vertex-id order (copy)."""
        ids = self.vertex_ids()
        return self._pos[ids].copy()

    def add_vertex(self, pos: Sequence[float]) -> int:
        p = np.asarray(pos, dtype=np.float64)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise ValueError(f"bad vertex position {pos!r}")
        if self._nv == len(self._pos):
            new = np.empty((int(len(self._pos) * _GROW) + 8, 3), np.float64)
            new[: self._nv] = self._pos[: self._nv]
            self._pos = new
        v = self._nv
        self._pos[v] = p
        self._nv += 1
        self._alive.append(True)
        self._v_edges.append(set())
        self._v_tris.append(set())
        return v

    def move_vertex(self, v: int, pos: Sequence[float]) -> None:
        self._check_vertex(v)
        p = np.asarray(pos, dtype=np.float64)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise ValueError(f"bad vertex position {pos!r}")
        self._pos[v] = p

    def kill_vertex(self, v: int) -> None:
        """Remove an isolated vertex; its index is never reused."""
        self._check_vertex(v)
        if self._v_edges[v] or self._v_tris[v]:
            raise ValueError(f"vertex {v} still has incident simplices")
        self._alive[v] = False

    # -- edges ------------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self._edge_tuple)

    def edge_ids(self) -> list[int]:
        return sorted(self._edge_tuple)

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self._edge_id

    def edge(self, eid: int) -> tuple[int, int]:
        try:
            return self._edge_tuple[eid]
        except KeyError:
            raise KeyError(f"unknown edge id {eid}") from None

    def edge_id(self, a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        try:
            return self._edge_id[key]
        except KeyError:
            raise KeyError(f"no edge {key}") from None

    def add_edge(self, a: int, b: int) -> int:
        key = self._edge_key(a, b)
        if key in self._edge_id:
            raise ValueError(f"edge {key} already present")
        eid = self._next_eid
        self._next_eid += 1
        self._edge_id[key] = eid
        self._edge_tuple[eid] = key
        self._v_edges[key[0]].add(eid)
        self._v_edges[key[1]].add(eid)
        return eid

    def remove_edge(self, eid: int) -> None:
        key = self.edge(eid)
        del self._edge_id[key]
        del self._edge_tuple[eid]
        self._v_edges[key[0]].discard(eid)
        self._v_edges[key[1]].discard(eid)

    def reconnect_edge(self, eid: int, a: int, b: int) -> None:
        """Rewrite an edge's vertex tuple, keeping its id."""
        old = self.edge(eid)
        key = self._edge_key(a, b)
        if key in self._edge_id:
            raise ValueError(f"edge {key} already present")
        del self._edge_id[old]
        self._v_edges[old[0]].discard(eid)
        self._v_edges[old[1]].discard(eid)
        self._edge_id[key] = eid
        self._edge_tuple[eid] = key
        self._v_edges[key[0]].add(eid)
        self._v_edges[key[1]].add(eid)

    # -- triangles --------------------------------------------------------

    @property
    def n_triangles(self) -> int:
        return len(self._tri_tuple)

    def triangle_ids(self) -> list[int]:
        return sorted(self._tri_tuple)

    def has_triangle(self, a: int, b: int, c: int) -> bool:
        return tuple(sorted((a, b, c))) in self._tri_id

    def triangle(self, tid: int) -> tuple[int, int, int]:
        try:
            return self._tri_tuple[tid]
        except KeyError:
            raise KeyError(f"unknown triangle id {tid}") from None

    def add_triangle(self, a: int, b: int, c: int, ensure_edges: bool = True) -> int:
        key = self._tri_key(a, b, c)
        if key in self._tri_id:
            raise ValueError(f"triangle {key} already present")
        for u, w in ((key[0], key[1]), (key[0], key[2]), (key[1], key[2])):
            if not self.has_edge(u, w):
                if not ensure_edges:
                    raise ValueError(f"triangle {key} missing sub-edge ({u}, {w})")
                self.add_edge(u, w)
        tid = self._next_tid
        self._next_tid += 1
        self._tri_id[key] = tid
        self._tri_tuple[tid] = key
        for v in key:
            self._v_tris[v].add(tid)
        return tid

    def remove_triangle(self, tid: int) -> None:
        key = self.triangle(tid)
        del self._tri_id[key]
        del self._tri_tuple[tid]
        for v in key:
            self._v_tris[v].discard(tid)

    def reconnect_triangle(self, tid: int, a: int, b: int, c: int) -> None:
        """Rewrite a triangle's vertex tuple, keeping its id."""
        old = self.triangle(tid)
        key = self._tri_key(a, b, c)
        if key in self._tri_id:
            raise ValueError(f"triangle {key} already present")
        del self._tri_id[old]
        for v in old:
            self._v_tris[v].discard(tid)
        self._tri_id[key] = tid
        self._tri_tuple[tid] = key
        for v in key:
            self._v_tris[v].add(tid)

    def edge_triangle_count(self, eid: int) -> int:
        a, b = self.edge(eid)
        shared = self._v_tris[a] & self._v_tris[b]
        return sum(1 for tid in shared if a in self._tri_tuple[tid] and b in self._tri_tuple[tid])

    def triangles_of_edge(self, eid: int) -> list[int]:
        a, b = self.edge(eid)
        shared = self._v_tris[a] & self._v_tris[b]
        return sorted(tid for tid in shared if a in self._tri_tuple[tid] and b in self._tri_tuple[tid])

    # -- queries ----------------------------------------------------------

    def star(self, v: int) -> Star:
        self._check_vertex(v)
        return Star(v, tuple(sorted(self._v_edges[v])), tuple(sorted(self._v_tris[v])))

    def edge_tuples(self) -> set[tuple[int, int]]:
        return set(self._edge_id)

    def triangle_tuples(self) -> set[tuple[int, int, int]]:
        return set(self._tri_id)

    def copy(self) -> "SimplicialComplex":
        c = SimplicialComplex.__new__(SimplicialComplex)
        c._pos = self._pos[: self._nv].copy()
        c._nv = self._nv
        c._alive = list(self._alive)
        c._edge_tuple = dict(self._edge_tuple)
        c._edge_id = dict(self._edge_id)
        c._tri_tuple = dict(self._tri_tuple)
        c._tri_id = dict(self._tri_id)
        c._v_edges = [set(s) for s in self._v_edges]
        c._v_tris = [set(s) for s in self._v_tris]
        c._next_eid = self._next_eid
        c._next_tid = self._next_tid
        return c

    def validate(self) -> list[str]:
        """Full-rescan integrity check.

        Raises on structural corruption (closure, indexing, tuple order).
        Returns human-readable flags for degenerate simplices, which are
        legal but worth surfacing.
        """
        flags: list[str] = []
        for eid, (a, b) in self._edge_tuple.items():
            if not (a < b):
                raise AssertionError(f"edge {eid} tuple not sorted: {(a, b)}")
            for v in (a, b):
                if not self.is_alive(v):
                    raise AssertionError(f"edge {eid} references dead/missing vertex {v}")
                if eid not in self._v_edges[v]:
                    raise AssertionError(f"edge {eid} missing from incidence of {v}")
            if np.array_equal(self._pos[a], self._pos[b]):
                flags.append(f"degenerate zero-length edge {eid} {(a, b)}")
        for tid, tri in self._tri_tuple.items():
            if list(tri) != sorted(tri) or len(set(tri)) != 3:
                raise AssertionError(f"triangle {tid} tuple malformed: {tri}")
            for v in tri:
                if not self.is_alive(v):
                    raise AssertionError(f"triangle {tid} references dead/missing vertex {v}")
                if tid not in self._v_tris[v]:
                    raise AssertionError(f"triangle {tid} missing from incidence of {v}")
            a, b, c = tri
            for u, w in ((a, b), (a, c), (b, c)):
                if not self.has_edge(u, w):
                    raise AssertionError(f"closure broken: triangle {tid} missing edge ({u}, {w})")
            area2 = np.linalg.norm(np.cross(self._pos[b] - self._pos[a], self._pos[c] - self._pos[a]))
            if not area2 > 0.0:
                flags.append(f"degenerate zero-area triangle {tid} {tri}")
        for v, eids in enumerate(self._v_edges):
            for eid in eids:
                if eid not in self._edge_tuple or v not in self._edge_tuple[eid]:
                    raise AssertionError(f"stale edge incidence {eid} at vertex {v}")
        for v, tids in enumerate(self._v_tris):
            for tid in tids:
                if tid not in self._tri_tuple or v not in self._tri_tuple[tid]:
                    raise AssertionError(f"stale triangle incidence {tid} at vertex {v}")
        return flags

    # -- internals --------------------------------------------------------

    def _check_vertex(self, v: int) -> None:
        if not isinstance(v, (int, np.integer)) or not self.is_alive(v):
            raise KeyError(f"unknown vertex id {v}")

    def _edge_key(self, a: int, b: int) -> tuple[int, int]:
        self._check_vertex(a)
        self._check_vertex(b)
        if a == b:
            raise ValueError(f"degenerate edge ({a}, {b})")
        return (min(a, b), max(a, b))

    def _tri_key(self, a: int, b: int, c: int) -> tuple[int, int, int]:
        for v in (a, b, c):
            self._check_vertex(v)
        if len({a, b, c}) != 3:
            raise ValueError(f"degenerate triangle ({a}, {b}, {c})")
        t = sorted((a, b, c))
        return (t[0], t[1], t[2])

    def __repr__(self) -> str:
        return (
            f"SimplicialComplex({self.n_vertices} vertices, "
            f"{self.n_edges} edges, {self.n_triangles} triangles)"
        )


def build_complex(
    positions: Sequence[Sequence[float]],
    simplices: Iterable[Sequence[int]] = (),
) -> SimplicialComplex:
    """Build a complex from positions and vertex-index tuples of arity 1-3.

    Closure is enforced by inserting missing sub-simplices, duplicates
    collapse to one copy, and ids are assigned dimension-major in
    lexicographic order of the sorted vertex tuples.
    """
    pos = np.asarray(positions, dtype=np.float64)
    if pos.size == 0:
        pos = pos.reshape(0, 3)
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise ValueError(f"positions must be (n, 3), got {pos.shape}")
    if not np.all(np.isfinite(pos)):
        raise ValueError("non-finite vertex coordinates")
    n = len(pos)

    edge_set: set[tuple[int, int]] = set()
    tri_set: set[tuple[int, int, int]] = set()
    for s in simplices:
        t = tuple(int(v) for v in s)
        if not 1 <= len(t) <= 3:
            raise ValueError(f"simplex arity must be 1-3, got {t}")
        for v in t:
            if not 0 <= v < n:
                raise ValueError(f"vertex index {v} out of range (n={n})")
        if len(set(t)) != len(t):
            raise ValueError(f"repeated vertex in simplex {t}")
        if len(t) == 2:
            edge_set.add((min(t), max(t)))
        elif len(t) == 3:
            st = tuple(sorted(t))
            tri_set.add(st)  # type: ignore[arg-type]
            edge_set.add((st[0], st[1]))
            edge_set.add((st[0], st[2]))
            edge_set.add((st[1], st[2]))

    c = SimplicialComplex()
    for p in pos:
        c.add_vertex(p)
    for a, b in sorted(edge_set):
        c.add_edge(a, b)
    for a, b, cc in sorted(tri_set):
        c.add_triangle(a, b, cc, ensure_edges=False)
    return c


def star(c: SimplicialComplex, v: int) -> Star:
    """Edges and triangles containing ``v``, each list ascending by id."""
    return c.star(v)


def is_boundary_edge(c: SimplicialComplex, eid: int) -> EdgeKind:
    """Classify an edge by triangle incidence.

    ``boundary`` is true iff the edge lies in exactly one triangle; wire
    edges in no triangle at all come back with ``isolated`` set instead.
    """
    count = c.edge_triangle_count(eid)
    return EdgeKind(boundary=(count == 1), isolated=(count == 0))
