"""Greedy generalized simplification of a simplicial complex.

Repeatedly collapses the cheapest candidate vertex pair (real edges plus
virtual edges bridging disconnected parts) until a vertex target is hit
or a single point remains.  Every collapse removes exactly one vertex, so
a full run over n vertices emits exactly n-1 collapse records, and the
record sequence is rich enough to be reversed into a vertex-split stream.

The pair heap uses lazy invalidation: entries carry per-vertex version
stamps and are discarded on pop when a stamp no longer matches.  Costs
stored in live entries are always current because a collapse only changes
the survivor's quadric, and every pair touching the survivor is re-pushed.
"""

from __future__ import annotations

import dataclasses
import hashlib
import heapq

import numpy as np

from .complex import SimplicialComplex
from .delaunay import delaunay_virtual_edges, knn_pairs
from .quadrics import (
    PenaltyConfig,
    Quadric,
    fundamental_quadric,
    optimal_placement_choice,
    reachable_midpoint,
)

KEPT = "kept-with-survivor"
REMAPPED = "remapped"
MERGED = "merged-away"
DELETED = "deleted-degenerate"

PLACEMENTS = ("keep-v1", "keep-v2", "midpoint")

MODES = ("edges-only", "edges+delaunay", "edges+knn")


@dataclasses.dataclass(frozen=True)
class CandidatePair:
    """One collapse candidate with its cached cost and placement.

    Stamps record the endpoint versions at costing time; a mismatch later
    marks the entry stale.
    """

    v1: int
    v2: int
    kind: str  # "mesh-edge" | "virtual"
    cost: float = 0.0
    placement: str = "keep-v1"
    stamp1: int = 0
    stamp2: int = 0


@dataclasses.dataclass
class CollapseRecord:
    """One executed collapse: the pair, where the survivor went, and the
    fate of every simplex that was incident to either endpoint."""

    step: int
    pair: tuple[int, int]
    survivor: int
    placement: str
    position: np.ndarray
    cost: float
    diff: dict[tuple[int, ...], str]

    @property
    def removed(self) -> int:
        return self.pair[1] if self.survivor == self.pair[0] else self.pair[0]


@dataclasses.dataclass
class CollapseLog:
    """Ordered collapse records plus a snapshot of the input complex.

    The snapshot carries the pre-collapse geometry that reversal needs;
    ``snapshot_id`` is a stable content digest for reports.
    """

    initial: SimplicialComplex
    records: list[CollapseRecord]
    root_position: np.ndarray | None = None

    @property
    def snapshot_id(self) -> str:
        h = hashlib.sha256()
        ids = self.initial.vertex_ids()
        h.update(np.ascontiguousarray(self.initial.positions).tobytes())
        h.update(repr(sorted(self.initial.edge_tuples())).encode())
        h.update(repr(sorted(self.initial.triangle_tuples())).encode())
        h.update(repr(ids).encode())
        return h.hexdigest()[:16]

    def is_full(self) -> bool:
        return len(self.records) == self.initial.n_vertices - 1


def candidate_pairs(c: SimplicialComplex, mode: str = "edges+delaunay", knn_k: int = 8) -> set[CandidatePair]:
    """Initial collapse candidates: all mesh edges, plus virtual pairs in
    the requested mode.  Costs are not filled in here."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    mesh_edges = c.edge_tuples()
    out = {CandidatePair(a, b, "mesh-edge") for a, b in mesh_edges}
    if mode == "edges-only" or c.n_vertices <= 1:
        return out
    ids = c.vertex_ids()
    pos = np.array([c.position(v) for v in ids])
    if mode == "edges+delaunay":
        raw = delaunay_virtual_edges(pos)
    else:
        raw = knn_pairs(pos, k=knn_k)
    for a, b in raw:
        pair = (ids[a], ids[b]) if ids[a] < ids[b] else (ids[b], ids[a])
        if pair not in mesh_edges:
            out.add(CandidatePair(pair[0], pair[1], "virtual"))
    return out


def collapse(
    c: SimplicialComplex,
    pair: tuple[int, int],
    placement: str,
    step: int = 0,
    cost: float = 0.0,
) -> CollapseRecord:
    """Merge pair[1] into pair[0] in place.

    Simplices of the removed vertex remap to the survivor; remaps that
    would duplicate an existing simplex merge away instead; the collapsing
    edge and any triangle containing both endpoints degenerate and are
    deleted.  Remapped simplices keep their ids; deleted ids retire.
    """
    v1, v2 = pair
    if v1 == v2:
        raise ValueError(f"stale pair ({v1}, {v2}): endpoints already merged")
    if placement not in PLACEMENTS:
        raise ValueError(f"placement must be one of {PLACEMENTS}, got {placement!r}")
    star1 = c.star(v1)
    star2 = c.star(v2)
    p1, p2 = c.position(v1), c.position(v2)
    if placement == "keep-v1":
        p = p1
    elif placement == "keep-v2":
        p = p2
    else:
        m = reachable_midpoint(p1, p2)
        p = m if m is not None else 0.5 * (p1 + p2)

    diff: dict[tuple[int, ...], str] = {}
    for tid in star1.triangles:
        diff[c.triangle(tid)] = KEPT
    for eid in star1.edges:
        diff[c.edge(eid)] = KEPT

    tri_degen: list[int] = []
    tri_merge: list[int] = []
    tri_remap: list[tuple[int, int, int]] = []
    for tid in star2.triangles:
        t = c.triangle(tid)
        if v1 in t:
            diff[t] = DELETED
            tri_degen.append(tid)
        else:
            u, w = (x for x in t if x != v2)
            if c.has_triangle(v1, u, w):
                diff[t] = MERGED
                tri_merge.append(tid)
            else:
                diff[t] = REMAPPED
                tri_remap.append((tid, u, w))

    edge_degen: list[int] = []
    edge_merge: list[int] = []
    edge_remap: list[tuple[int, int]] = []
    for eid in star2.edges:
        t = c.edge(eid)
        if v1 in t:
            diff[t] = DELETED
            edge_degen.append(eid)
        else:
            u = t[0] if t[1] == v2 else t[1]
            if c.has_edge(v1, u):
                diff[t] = MERGED
                edge_merge.append(eid)
            else:
                diff[t] = REMAPPED
                edge_remap.append((eid, u))

    for tid in tri_degen:
        c.remove_triangle(tid)
    for tid in tri_merge:
        c.remove_triangle(tid)
    for tid, u, w in tri_remap:
        c.reconnect_triangle(tid, v1, u, w)
    for eid in edge_degen:
        c.remove_edge(eid)
    for eid in edge_merge:
        c.remove_edge(eid)
    for eid, u in edge_remap:
        c.reconnect_edge(eid, v1, u)
    c.move_vertex(v1, p)
    c.kill_vertex(v2)

    return CollapseRecord(
        step=step,
        pair=(v1, v2),
        survivor=v1,
        placement=placement,
        position=np.asarray(p, dtype=np.float64),
        cost=cost,
        diff=diff,
    )


def initial_vertex_quadrics(c: SimplicialComplex, pc: PenaltyConfig) -> dict[int, Quadric]:
    """Aggregate quadrics for every live vertex, sharing per-simplex
    quadrics across stars.  Bitwise identical to calling
    aggregate_vertex_quadric per vertex."""
    tri_q: dict[int, Quadric] = {}
    for tid in c.triangle_ids():
        tri_q[tid] = fundamental_quadric([c.position(v) for v in c.triangle(tid)])
    edge_q: dict[int, Quadric] = {}
    for eid in c.edge_ids():
        if c.edge_triangle_count(eid) <= 1:
            edge_q[eid] = fundamental_quadric([c.position(v) for v in c.edge(eid)])
    out: dict[int, Quadric] = {}
    for v in c.vertex_ids():
        st = c.star(v)
        q = fundamental_quadric(c.position(v)).scaled(pc.w_vertex)
        for tid in st.triangles:
            q = q + tri_q[tid].scaled(pc.w_face)
        for eid in st.edges:
            if eid in edge_q:
                q = q + edge_q[eid].scaled(pc.w_boundary_edge)
        out[v] = q
    return out


class GreedySimplifier:
    """Stateful driver of a single simplification run.

    Exposes stepping so tests can rescan the candidate set between
    collapses; use :func:`simplify` for the plain one-shot interface.
    """

    def __init__(
        self,
        c: SimplicialComplex,
        penalties: PenaltyConfig = PenaltyConfig(),
        mode: str = "edges+delaunay",
        knn_k: int = 8,
    ) -> None:
        if c.n_vertices == 0:
            raise ValueError("empty complex")
        self.initial = c.copy()
        self.c = c.copy()
        self.penalties = penalties
        self.quadric = initial_vertex_quadrics(self.c, penalties)
        self.stamp: dict[int, int] = {v: 0 for v in self.c.vertex_ids()}
        self.neighbors: dict[int, set[int]] = {v: set() for v in self.c.vertex_ids()}
        self.records: list[CollapseRecord] = []
        self._heap: list[tuple[float, int, int, int, int, int]] = []
        for cand in candidate_pairs(self.c, mode, knn_k):
            self.neighbors[cand.v1].add(cand.v2)
            self.neighbors[cand.v2].add(cand.v1)
        for v1 in sorted(self.neighbors):
            for v2 in sorted(self.neighbors[v1]):
                if v1 < v2:
                    self._push(v1, v2)

    @property
    def n_vertices(self) -> int:
        return self.c.n_vertices

    def alive_ids(self) -> list[int]:
        return self.c.vertex_ids()

    def _push(self, v1: int, v2: int) -> None:
        qe = self.quadric[v1] + self.quadric[v2]
        choice, _, cost = optimal_placement_choice(qe, self.c.position(v1), self.c.position(v2))
        heapq.heappush(self._heap, (cost, v1, v2, self.stamp[v1], self.stamp[v2], choice))

    def pop_min_valid(self) -> tuple[float, int, int, int] | None:
        """Next valid (cost, v1, v2, placement index); stale entries are
        discarded lazily."""
        while self._heap:
            cost, v1, v2, s1, s2, choice = heapq.heappop(self._heap)
            if (
                self.c.is_alive(v1)
                and self.c.is_alive(v2)
                and self.stamp[v1] == s1
                and self.stamp[v2] == s2
            ):
                return cost, v1, v2, choice
        return None

    def current_pairs(self) -> list[tuple[int, int]]:
        """All currently valid candidate pairs (for rescan oracles)."""
        out = []
        for v1 in sorted(self.neighbors):
            if not self.c.is_alive(v1):
                continue
            for v2 in sorted(self.neighbors[v1]):
                if v1 < v2 and self.c.is_alive(v2):
                    out.append((v1, v2))
        return out

    def pair_cost(self, v1: int, v2: int) -> tuple[float, int]:
        """Recompute a pair's cost and placement from current state."""
        qe = self.quadric[v1] + self.quadric[v2]
        choice, _, cost = optimal_placement_choice(qe, self.c.position(v1), self.c.position(v2))
        return cost, choice

    def step(self) -> CollapseRecord | None:
        """Execute the cheapest valid collapse; None when no candidates
        remain."""
        popped = self.pop_min_valid()
        if popped is None:
            return None
        cost, v1, v2, choice = popped
        rec = collapse(self.c, (v1, v2), PLACEMENTS[choice], step=len(self.records), cost=cost)
        self.quadric[v1] = self.quadric[v1] + self.quadric.pop(v2)
        self.stamp[v1] += 1
        self.stamp[v2] += 1
        nbrs2 = self.neighbors.pop(v2, set())
        nbrs1 = self.neighbors[v1]
        for u in nbrs2:
            if u == v1:
                continue
            self.neighbors[u].discard(v2)
            self.neighbors[u].add(v1)
            nbrs1.add(u)
        nbrs1.discard(v1)
        nbrs1.discard(v2)
        for u in sorted(nbrs1):
            self._push(min(v1, u), max(v1, u))
        self.records.append(rec)
        return rec

    def run(self, target_vertices: int = 1) -> None:
        while self.c.n_vertices > target_vertices:
            if self.step() is None:
                raise RuntimeError(
                    f"candidate pairs exhausted at {self.c.n_vertices} vertices "
                    f"(target {target_vertices}); virtual edges may be disabled"
                )

    def log(self) -> CollapseLog:
        root = None
        if self.c.n_vertices == 1:
            root = self.c.position(self.c.vertex_ids()[0])
        return CollapseLog(initial=self.initial, records=list(self.records), root_position=root)

    def result(self) -> SimplicialComplex:
        """Compacted copy of the current complex with dense vertex ids."""
        return compact(self.c)


def compact(c: SimplicialComplex) -> SimplicialComplex:
    """Rebuild with dense vertex ids (ascending original order) and
    freshly assigned simplex ids."""
    from .complex import build_complex

    ids = c.vertex_ids()
    remap = {v: i for i, v in enumerate(ids)}
    pos = [c.position(v) for v in ids]
    simplices: list[tuple[int, ...]] = []
    simplices.extend(tuple(remap[v] for v in t) for t in sorted(c.edge_tuples()))
    simplices.extend(tuple(remap[v] for v in t) for t in sorted(c.triangle_tuples()))
    if not pos:
        raise ValueError("cannot compact an empty complex")
    return build_complex(pos, simplices)


def simplify(
    c: SimplicialComplex,
    penalties: PenaltyConfig = PenaltyConfig(),
    mode: str = "edges+delaunay",
    target_vertices: int | None = None,
    knn_k: int = 8,
) -> tuple[SimplicialComplex, CollapseLog]:
    """Simplify down to ``target_vertices`` (None for a single point).

    Returns the compacted result and the collapse log.  Deterministic:
    ties in cost break on (v1, v2).
    """
    n = c.n_vertices
    if n == 0:
        raise ValueError("empty complex")
    target = 1 if target_vertices is None else int(target_vertices)
    if target < 1:
        raise ValueError(f"target must be >= 1, got {target}")
    if target > n:
        raise ValueError(f"unreachable target {target} > {n} vertices")
    sim = GreedySimplifier(c, penalties, mode, knn_k)
    sim.run(target)
    return sim.result(), sim.log()
