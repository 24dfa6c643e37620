"""Progressive simplicial complex: a root point plus an ordered list of
vertex splits that rebuilds a complex one vertex at a time.

A split names the source vertex, a positional offset for the new vertex,
a midpoint flag (whether the source sat at the midpoint of the split
pair), and one topological label per adjacent simplex of the source:

=====  ==============================================================
label  meaning for the split of s creating t
=====  ==============================================================
V0     no edge s-t is created
V1     the edge s-t is created
E0     incident edge stays on s unchanged
E1     incident edge reconnects its s-end to t
E2     incident edge stays and a parallel copy attached to t appears
E3     incident edge stays and the triangle (other, s, t) appears,
       together with its sub-edges
F0     incident triangle unchanged
F1     incident triangle reconnects its s-corner to t
F2     incident triangle stays and a copy attached to t appears
=====  ==============================================================

Label lists are ordered: the vertex label first, then triangle labels
ascending by id, then edge labels ascending by id.  Four consistency
rules tie the labels together (see :func:`check_rules`); they are exactly
the closure constraints of the post-split complex.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import NamedTuple, Sequence

import numpy as np

from .complex import SimplicialComplex, build_complex
from .simplify import CollapseLog


class TopoLabel(enum.IntEnum):
    V0 = 0
    V1 = 1
    E0 = 2
    E1 = 3
    E2 = 4
    E3 = 5
    F0 = 6
    F1 = 7
    F2 = 8


_V_LABELS = (TopoLabel.V0, TopoLabel.V1)
_E_LABELS = (TopoLabel.E0, TopoLabel.E1, TopoLabel.E2, TopoLabel.E3)
_F_LABELS = (TopoLabel.F0, TopoLabel.F1, TopoLabel.F2)


class RuleViolation(NamedTuple):
    """First broken consistency rule (1-4) and the label positions
    involved."""

    rule: int
    positions: tuple[int, ...]


class RuleViolationError(ValueError):
    def __init__(self, violation: RuleViolation, step: int | None = None):
        self.violation = violation
        self.step = step
        at = f" at step {step}" if step is not None else ""
        super().__init__(
            f"rule R{violation.rule} violated{at} (label positions {list(violation.positions)})"
        )


class ReplayError(ValueError):
    """A split stream failed to apply; reports the offending step."""

    def __init__(self, step: int, cause: Exception):
        self.step = step
        self.cause = cause
        super().__init__(f"replay failed at step {step}: {cause}")


@dataclasses.dataclass(frozen=True)
class VertexSplit:
    """One refinement step: split vertex ``vsid``, translating the new
    vertex by ``offset`` (and the source by ``-offset`` when ``midpoint``
    is set).

    ``anchored`` reinterprets ``offset`` as the new vertex's absolute
    position.  Encoders emit it only when no relative offset can land the
    new vertex on its target exactly (rounding of fl(p_s + offset) can
    only reach every 2^g-th float when the hop spans g binades); it keeps
    full-precision decoding bit-exact for every input.
    """

    vsid: int
    midpoint: bool
    offset: np.ndarray
    labels: tuple[TopoLabel, ...]
    anchored: bool = False

    def __post_init__(self):
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=np.float64))
        object.__setattr__(self, "labels", tuple(TopoLabel(l) for l in self.labels))


@dataclasses.dataclass(frozen=True)
class PSC:
    """Root position plus ordered splits; split i creates vertex i+1, and
    every new edge or triangle takes the next free id of its dimension."""

    root_position: np.ndarray
    splits: tuple[VertexSplit, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "root_position", np.asarray(self.root_position, dtype=np.float64)
        )
        object.__setattr__(self, "splits", tuple(self.splits))

    @property
    def n_vertices(self) -> int:
        return 1 + len(self.splits)


def star_layout(
    c: SimplicialComplex, s: int
) -> tuple[tuple[int, ...], tuple[int, ...], list[tuple[int, int]]]:
    """Star of ``s`` as (triangle ids, edge ids, sub-incidence).

    Ids ascend; sub-incidence gives, per incident triangle, the positions
    (indices into the edge-id list) of its two s-incident edges.
    """
    st = c.star(s)
    edge_pos = {eid: i for i, eid in enumerate(st.edges)}
    sub: list[tuple[int, int]] = []
    for tid in st.triangles:
        u, w = (v for v in c.triangle(tid) if v != s)
        sub.append((edge_pos[c.edge_id(s, u)], edge_pos[c.edge_id(s, w)]))
    return st.triangles, st.edges, sub


def _validate_label_classes(labels: Sequence[TopoLabel], n_tris: int, n_edges: int) -> None:
    if len(labels) != 1 + n_tris + n_edges:
        raise ValueError(
            f"label count {len(labels)} != 1 + {n_tris} triangles + {n_edges} edges"
        )
    if labels[0] not in _V_LABELS:
        raise ValueError(f"position 0 must hold a V label, got {labels[0]!r}")
    for i in range(n_tris):
        if labels[1 + i] not in _F_LABELS:
            raise ValueError(f"position {1 + i} must hold an F label, got {labels[1 + i]!r}")
    for i in range(n_edges):
        p = 1 + n_tris + i
        if labels[p] not in _E_LABELS:
            raise ValueError(f"position {p} must hold an E label, got {labels[p]!r}")


def check_rules(
    labels: Sequence[TopoLabel],
    layout: tuple[int, int],
    sub_incidence: Sequence[tuple[int, int]],
) -> RuleViolation | None:
    """Check the four topological consistency rules.

    R1: V0 forbids any E3.  R2: an F0 triangle forbids E1 on its two
    s-edges.  R3: F1 forbids E0 there.  R4: F2 forbids both E0 and E1.
    Returns the first violation found (V label, then triangles in label
    order), or None.
    """
    n_tris, n_edges = layout
    labels = [TopoLabel(l) for l in labels]
    _validate_label_classes(labels, n_tris, n_edges)
    if len(sub_incidence) != n_tris:
        raise ValueError("sub-incidence length does not match triangle count")
    e_base = 1 + n_tris
    if labels[0] == TopoLabel.V0:
        for i in range(n_edges):
            if labels[e_base + i] == TopoLabel.E3:
                return RuleViolation(1, (0, e_base + i))
    for ti in range(n_tris):
        f = labels[1 + ti]
        if f == TopoLabel.F0:
            forbidden, rule = (TopoLabel.E1,), 2
        elif f == TopoLabel.F1:
            forbidden, rule = (TopoLabel.E0,), 3
        else:
            forbidden, rule = (TopoLabel.E0, TopoLabel.E1), 4
        for ei in sub_incidence[ti]:
            if labels[e_base + ei] in forbidden:
                return RuleViolation(rule, (1 + ti, e_base + ei))
    return None


def apply_vsplit(c: SimplicialComplex, vs: VertexSplit) -> SimplicialComplex:
    """Apply one vertex split in place and return the same complex.

    The new vertex gets the next vertex id; new edges and triangles take
    ascending fresh ids in a fixed creation order (the s-t edge, then per
    ascending incident edge its E2/E3 creations, then per ascending
    incident triangle its F1/F2 targets).
    """
    s = vs.vsid
    if not c.is_alive(s):
        raise KeyError(f"split vertex {s} does not exist")
    offset = np.asarray(vs.offset, dtype=np.float64)
    if offset.shape != (3,) or not np.all(np.isfinite(offset)):
        raise ValueError(f"bad offset {vs.offset!r}")
    tri_ids, edge_ids, sub = star_layout(c, s)
    labels = [TopoLabel(l) for l in vs.labels]
    violation = check_rules(labels, (len(tri_ids), len(edge_ids)), sub)
    if violation is not None:
        raise RuleViolationError(violation)

    p_s = c.position(s)
    if vs.anchored:
        t = c.add_vertex(offset)
        if vs.midpoint:
            c.move_vertex(s, 2.0 * p_s - offset)
    else:
        t = c.add_vertex(p_s + offset)
        if vs.midpoint:
            c.move_vertex(s, p_s - offset)
    if labels[0] == TopoLabel.V1:
        c.add_edge(s, t)
    nf = len(tri_ids)
    for k, eid in enumerate(edge_ids):
        lab = labels[1 + nf + k]
        a, b = c.edge(eid)
        u = a if b == s else b
        if lab == TopoLabel.E1:
            c.reconnect_edge(eid, t, u)
        elif lab == TopoLabel.E2:
            c.add_edge(t, u)
        elif lab == TopoLabel.E3:
            c.add_edge(t, u)
            c.add_triangle(s, t, u, ensure_edges=False)
    for k, tid in enumerate(tri_ids):
        lab = labels[1 + k]
        if lab == TopoLabel.F0:
            continue
        u, w = (v for v in c.triangle(tid) if v != s)
        if lab == TopoLabel.F1:
            c.reconnect_triangle(tid, t, u, w)
        else:
            c.add_triangle(t, u, w, ensure_edges=False)
    return c


def classify_split(
    pre: SimplicialComplex, post: SimplicialComplex, s: int, t: int
) -> list[TopoLabel]:
    """Recover the label list of the split of ``s`` that produced ``t``.

    ``post`` must differ from ``pre`` by exactly that one split; anything
    else raises ValueError.
    """
    pre_ids = set(pre.vertex_ids())
    post_ids = set(post.vertex_ids())
    if post_ids - pre_ids != {t} or pre_ids - post_ids:
        raise ValueError("vertex diff is not a single added vertex")
    if not pre.is_alive(s):
        raise KeyError(f"unknown split vertex {s}")

    pre_edges = pre.edge_tuples()
    post_edges = post.edge_tuples()
    pre_tris = pre.triangle_tuples()
    post_tris = post.triangle_tuples()

    st_key = (min(s, t), max(s, t))
    labels: list[TopoLabel] = [TopoLabel.V1 if st_key in post_edges else TopoLabel.V0]

    tri_ids, edge_ids, _ = star_layout(pre, s)
    removed_edges: set = set()
    added_edges: set = {st_key} if labels[0] == TopoLabel.V1 else set()
    removed_tris: set = set()
    added_tris: set = set()

    for tid in tri_ids:
        tri = pre.triangle(tid)
        u, w = (v for v in tri if v != s)
        t_key = tuple(sorted((t, u, w)))
        a = tri in post_tris
        b = t_key in post_tris
        if a and b:
            labels.append(TopoLabel.F2)
            added_tris.add(t_key)
        elif a:
            labels.append(TopoLabel.F0)
        elif b:
            labels.append(TopoLabel.F1)
            removed_tris.add(tri)
            added_tris.add(t_key)
        else:
            raise ValueError(f"triangle {tri} vanished: not a single vertex split")
    for eid in edge_ids:
        e = pre.edge(eid)
        u = e[0] if e[1] == s else e[1]
        t_key = (min(t, u), max(t, u))
        a = e in post_edges
        b = t_key in post_edges
        if a and b:
            stu = tuple(sorted((s, t, u)))
            if stu in post_tris and stu not in pre_tris:
                labels.append(TopoLabel.E3)
                added_tris.add(stu)
            else:
                labels.append(TopoLabel.E2)
            added_edges.add(t_key)
        elif a:
            labels.append(TopoLabel.E0)
        elif b:
            labels.append(TopoLabel.E1)
            removed_edges.add(e)
            added_edges.add(t_key)
        else:
            raise ValueError(f"edge {e} vanished: not a single vertex split")

    if post_edges != (pre_edges - removed_edges) | added_edges:
        raise ValueError("edge diff is not a single vertex split")
    if post_tris != (pre_tris - removed_tris) | added_tris:
        raise ValueError("triangle diff is not a single vertex split")
    return labels


# -- offset exactness ------------------------------------------------------


def _search_ulps(x0: float, limit: int):
    yield x0
    up = down = x0
    for _ in range(limit):
        up = math.nextafter(up, math.inf)
        yield up
        down = math.nextafter(down, -math.inf)
        yield down


def _fix_plain(ps: float, target: float, limit: int = 64) -> float:
    """Offset x with fl(ps + x) == target, when one exists nearby."""
    for x in _search_ulps(target - ps, limit):
        if ps + x == target:
            return x
    return target - ps


def _fix_midpoint(ps: float, s_target: float, t_target: float, limit: int = 32) -> float:
    """Offset x with fl(ps - x) == s_target and fl(ps + x) == t_target.

    Searches a few ulps around the natural candidates; when the two
    constraints cannot be met jointly (possible for adversarial
    magnitudes) the t side wins and s lands within an ulp.
    """
    centers = (0.5 * (t_target - s_target), t_target - ps, ps - s_target)
    seen = set()
    for x0 in centers:
        for x in _search_ulps(x0, limit):
            if x in seen:
                continue
            seen.add(x)
            if ps - x == s_target and ps + x == t_target:
                return x
    return _fix_plain(ps, t_target)


def _fix_offset(
    ps: np.ndarray, t_target: np.ndarray, s_target: np.ndarray | None
) -> np.ndarray:
    out = np.empty(3)
    for i in range(3):
        if s_target is None:
            out[i] = _fix_plain(float(ps[i]), float(t_target[i]))
        else:
            out[i] = _fix_midpoint(float(ps[i]), float(s_target[i]), float(t_target[i]))
    return out


# -- reversal ---------------------------------------------------------------


def reverse_log(log: CollapseLog) -> PSC:
    """Turn a full collapse log into a PSC by replaying it backwards.

    The last survivor becomes vertex 0; undoing collapse k emits the
    split that recreates the pre-collapse pair, with roles normalized so
    the split source is the vertex that kept the survivor's position
    (for a keep-v2 collapse the roles swap).  Offsets are ulp-adjusted so
    the decode replay reproduces the source positions bit for bit.
    """
    if not log.is_full():
        raise ValueError(
            f"partial log: {len(log.records)} records for {log.initial.n_vertices} vertices"
        )
    n = log.initial.n_vertices
    if n == 0:
        raise ValueError("empty complex")

    pos = {v: log.initial.position(v) for v in log.initial.vertex_ids()}
    pre_pos: list[tuple[np.ndarray, np.ndarray]] = []
    for rec in log.records:
        v1, v2 = rec.pair
        pre_pos.append((pos[v1], pos[v2]))
        pos[rec.survivor] = np.asarray(rec.position, dtype=np.float64)

    if n == 1:
        only = log.initial.vertex_ids()[0]
        return PSC(log.initial.position(only), ())

    final_survivor = log.records[-1].survivor
    root = pos[final_survivor]
    dec = build_complex([root])
    fwd = {final_survivor: 0}  # original id -> decoder id
    inv = {0: final_survivor}
    splits: list[VertexSplit] = []

    for k in range(len(log.records) - 1, -1, -1):
        rec = log.records[k]
        v1, v2 = rec.pair
        if rec.placement == "keep-v2":
            s_role, t_role = v2, v1
        else:
            s_role, t_role = v1, v2
        p_s = pre_pos[k][0] if s_role == v1 else pre_pos[k][1]
        p_t = pre_pos[k][1] if t_role == v2 else pre_pos[k][0]

        s_dec = fwd[rec.survivor]
        tri_ids, edge_ids, sub = star_layout(dec, s_dec)
        diff = rec.diff
        st_key = (min(v1, v2), max(v1, v2))
        labels: list[TopoLabel] = [
            TopoLabel.V1 if st_key in diff else TopoLabel.V0
        ]
        for tid in tri_ids:
            u, w = (inv[v] for v in dec.triangle(tid) if v != s_dec)
            a = tuple(sorted((s_role, u, w))) in diff
            b = tuple(sorted((t_role, u, w))) in diff
            if not (a or b):
                raise AssertionError(f"internal: triangle {(u, w)} has no pre-image at step {k}")
            labels.append(TopoLabel.F2 if a and b else TopoLabel.F0 if a else TopoLabel.F1)
        for eid in edge_ids:
            e = dec.edge(eid)
            u = inv[e[0] if e[1] == s_dec else e[1]]
            a = (min(s_role, u), max(s_role, u)) in diff
            b = (min(t_role, u), max(t_role, u)) in diff
            if a and b:
                stu = tuple(sorted((v1, v2, u)))
                labels.append(TopoLabel.E3 if stu in diff else TopoLabel.E2)
            elif a or b:
                labels.append(TopoLabel.E0 if a else TopoLabel.E1)
            else:
                raise AssertionError(f"internal: edge to {u} has no pre-image at step {k}")

        midpoint = rec.placement == "midpoint"
        ps_dec = dec.position(s_dec)
        offset = _fix_offset(ps_dec, p_t, p_s if midpoint else None)
        vs = VertexSplit(s_dec, midpoint, offset, tuple(labels))

        violation = check_rules(labels, (len(tri_ids), len(edge_ids)), sub)
        if violation is not None:
            raise AssertionError(f"internal: reversal emitted invalid split: {violation}")
        apply_vsplit(dec, vs)
        t_dec = dec.vertex_capacity - 1
        del fwd[rec.survivor]
        fwd[s_role] = s_dec
        fwd[t_role] = t_dec
        inv[s_dec] = s_role
        inv[t_dec] = t_role
        splits.append(vs)

    return PSC(root, tuple(splits))


def reconstruct(
    psc: PSC, steps: int | None = None, ratio: float | None = None
) -> SimplicialComplex:
    """Replay the first ``steps`` splits (or ``ceil(ratio * n)`` of them)
    from the root point; the result has 1 + steps vertices."""
    if steps is not None and ratio is not None:
        raise ValueError("give either steps or ratio, not both")
    if ratio is not None:
        if not 0.0 <= ratio <= 1.0:
            raise ValueError(f"ratio must be in [0, 1], got {ratio}")
        steps = math.ceil(ratio * len(psc.splits))
    if steps is None:
        steps = len(psc.splits)
    if steps < 0 or steps > len(psc.splits):
        raise ValueError(f"steps {steps} out of range 0..{len(psc.splits)}")
    c = build_complex([psc.root_position])
    for i in range(steps):
        try:
            apply_vsplit(c, psc.splits[i])
        except (RuleViolationError, ValueError, KeyError) as exc:
            raise ReplayError(i, exc) from exc
    return c
