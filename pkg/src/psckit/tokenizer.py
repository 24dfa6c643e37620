"""Token layout for vertex-split records and the validity oracle that
gates constrained decoding.

Base vocabulary (526 ids), one disjoint class per slot kind:

======== =========================================================
0-255    vertex-index bytes (high byte first, then low byte)
256-511  offset bytes (value 256+b); the three binary16 high bytes
         of x, y, z come first, then the three low bytes
512-513  vertex label V0/V1
514-516  triangle labels F0/F1/F2, ascending by triangle id
517-520  edge labels E0-E3, ascending by edge id
521-522  midpoint flag (false/true)
523-525  BOS / EOS / PAD
======== =========================================================

A record is ``idx_hi idx_lo off*6 V F* E* mid`` and is self-delimiting:
the midpoint token closes it.  A stream is ``BOS record* EOS``.  The
oracle ``phi(state, token)`` accepts a token iff the stream stays a
prefix of some decodable sequence: token classes must match positions,
the vertex index must name an existing vertex, label counts must match
the star of that vertex, offset bytes may not assemble an inf/nan, and
the four topological rules are enforced as the labels arrive (edge
labels come last, so their vertex/triangle context is complete).
"""

from __future__ import annotations

import dataclasses
import struct
from typing import Iterable, Sequence

import numpy as np

from .complex import SimplicialComplex, build_complex
from .psc import (
    PSC,
    TopoLabel,
    VertexSplit,
    apply_vsplit,
    star_layout,
)

IDX_BASE = 0
OFF_BASE = 256
V_BASE = 512
F_BASE = 514
E_BASE = 517
MID_FALSE = 521
MID_TRUE = 522
BOS = 523
EOS = 524
PAD = 525
BASE_VOCAB = 526

MAX_VERTICES = 65536


class TokenError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class TokenStream:
    """A token-id sequence; ``base`` marks streams with no BPE merges
    applied."""

    ids: tuple[int, ...]
    base: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        limit = BASE_VOCAB if self.base else 16384
        for i in self.ids:
            if not 0 <= i < limit:
                raise ValueError(f"token id {i} outside vocabulary (< {limit})")

    def __len__(self) -> int:
        return len(self.ids)


def token_class(tok: int) -> str:
    if 0 <= tok < OFF_BASE:
        return "idx"
    if OFF_BASE <= tok < V_BASE:
        return "off"
    if V_BASE <= tok < F_BASE:
        return "V"
    if F_BASE <= tok < E_BASE:
        return "F"
    if E_BASE <= tok <= 520:
        return "E"
    if tok in (MID_FALSE, MID_TRUE):
        return "mid"
    if tok == BOS:
        return "bos"
    if tok == EOS:
        return "eos"
    if tok == PAD:
        return "pad"
    raise ValueError(f"token id {tok} outside base vocabulary")


def _f16_bytes(value: float) -> tuple[int, int]:
    """(high byte, low byte) of the binary16 encoding."""
    h = np.float16(value)
    if not np.isfinite(h):
        raise ValueError(f"offset component {value} overflows binary16")
    lo, hi = np.asarray(h, dtype="<f2").tobytes()
    return hi, lo


def _f16_value(hi: int, lo: int) -> float:
    return float(np.frombuffer(struct.pack("<BB", lo, hi), dtype="<f2")[0])


def _hi_byte_finite(hi: int) -> bool:
    # binary16 exponent bits live in the high byte; all-ones exponent
    # means inf or nan whatever the low byte says
    return (hi & 0x7C) != 0x7C


def encode_vsplit(vs: VertexSplit, layout: tuple[int, int]) -> list[int]:
    """Base tokens of one record; ``layout`` is the (triangle, edge)
    count of the split vertex's star, which fixes the label ordering."""
    n_tris, n_edges = layout
    if not 0 <= vs.vsid < MAX_VERTICES:
        raise ValueError(f"vertex index {vs.vsid} does not fit two bytes")
    labels = [TopoLabel(l) for l in vs.labels]
    if len(labels) != 1 + n_tris + n_edges:
        raise ValueError(
            f"label count {len(labels)} does not match star layout {layout}"
        )
    toks = [vs.vsid >> 8, vs.vsid & 0xFF]
    his, los = [], []
    for component in np.asarray(vs.offset, dtype=np.float64):
        hi, lo = _f16_bytes(component)
        his.append(OFF_BASE + hi)
        los.append(OFF_BASE + lo)
    toks += his + los
    if labels[0] not in (TopoLabel.V0, TopoLabel.V1):
        raise ValueError(f"position 0 must hold a V label, got {labels[0]!r}")
    toks.append(V_BASE + int(labels[0]))
    for i in range(n_tris):
        lab = labels[1 + i]
        if not TopoLabel.F0 <= lab <= TopoLabel.F2:
            raise ValueError(f"position {1 + i} must hold an F label, got {lab!r}")
        toks.append(F_BASE + int(lab) - int(TopoLabel.F0))
    for i in range(n_edges):
        lab = labels[1 + n_tris + i]
        if not TopoLabel.E0 <= lab <= TopoLabel.E3:
            raise ValueError(
                f"position {1 + n_tris + i} must hold an E label, got {lab!r}"
            )
        toks.append(E_BASE + int(lab) - int(TopoLabel.E0))
    toks.append(MID_TRUE if vs.midpoint else MID_FALSE)
    return toks


class DecodeState:
    """Grammar position plus the complex reconstructed so far.

    Completed records are applied immediately, so vertex counts and star
    layouts are always current.  ``admissible()`` is the memoized token
    set the oracle checks against; ``push`` advances by one token.
    """

    def __init__(self, root_position=(0.0, 0.0, 0.0)):
        self.complex: SimplicialComplex = build_complex([root_position])
        self.splits: list[VertexSplit] = []
        self.done = False
        self._field = "bos"
        self._idx_hi = 0
        self._vsid = 0
        self._layout: tuple[tuple[int, ...], tuple[int, ...], list] | None = None
        self._labels: list[TopoLabel] = []
        self._off: list[int] = []
        self._midpoint = False
        self._adm: frozenset[int] | None = None
        self._shared = False

    def copy(self) -> "DecodeState":
        c = DecodeState.__new__(DecodeState)
        c.__dict__.update(self.__dict__)
        c.splits = list(self.splits)
        c._labels = list(self._labels)
        c._off = list(self._off)
        # the complex is shared copy-on-write: whoever applies a split
        # next makes its own copy
        self._shared = True
        c._shared = True
        return c

    @property
    def at_boundary(self) -> bool:
        return self._field == "boundary"

    def n_vertices(self) -> int:
        return self.complex.n_vertices

    def admissible(self) -> frozenset[int]:
        if self._adm is None:
            self._adm = frozenset(self._compute_admissible())
        return self._adm

    def _compute_admissible(self) -> set[int]:
        f = self._field
        if self.done:
            return set()
        if f == "bos":
            return {BOS}
        if f == "boundary":
            n = self.complex.n_vertices
            out = {EOS}
            out.update(IDX_BASE + hi for hi in range(min((n - 1) >> 8, 255) + 1))
            return out
        if f == "idx_lo":
            n = self.complex.n_vertices
            top = n - 1 - (self._idx_hi << 8)
            return {IDX_BASE + lo for lo in range(min(top, 255) + 1)}
        if f.startswith("off"):
            pos = int(f[3:])
            if pos < 3:
                return {OFF_BASE + b for b in range(256) if _hi_byte_finite(b)}
            return {OFF_BASE + b for b in range(256)}
        if f == "vlabel":
            return {V_BASE, V_BASE + 1}
        if f == "flabel":
            return {F_BASE, F_BASE + 1, F_BASE + 2}
        if f == "elabel":
            return self._admissible_edge_labels()
        if f == "mid":
            return {MID_FALSE, MID_TRUE}
        raise AssertionError(f"unknown field {f}")

    def _admissible_edge_labels(self) -> set[int]:
        assert self._layout is not None
        tri_ids, edge_ids, sub = self._layout
        e_pos = len(self._labels) - 1 - len(tri_ids)
        allowed = {TopoLabel.E0, TopoLabel.E1, TopoLabel.E2, TopoLabel.E3}
        if self._labels[0] == TopoLabel.V0:
            allowed.discard(TopoLabel.E3)
        for ti, (e1, e2) in enumerate(sub):
            if e_pos not in (e1, e2):
                continue
            fl = self._labels[1 + ti]
            if fl == TopoLabel.F0:
                allowed.discard(TopoLabel.E1)
            elif fl == TopoLabel.F1:
                allowed.discard(TopoLabel.E0)
            else:
                allowed.discard(TopoLabel.E0)
                allowed.discard(TopoLabel.E1)
        return {E_BASE + int(l) - int(TopoLabel.E0) for l in allowed}

    def push(self, tok: int) -> None:
        """Advance by one token; raises TokenError if phi rejects it."""
        if tok not in self.admissible():
            raise TokenError(
                f"token {tok} ({_safe_class(tok)}) not admissible at field "
                f"{self._field!r} after {len(self.splits)} records"
            )
        self._adm = None
        f = self._field
        if f == "bos":
            self._field = "boundary"
        elif f == "boundary":
            if tok == EOS:
                self.done = True
            else:
                self._idx_hi = tok - IDX_BASE
                self._field = "idx_lo"
        elif f == "idx_lo":
            self._vsid = (self._idx_hi << 8) | (tok - IDX_BASE)
            self._layout = star_layout(self.complex, self._vsid)
            self._off = []
            self._field = "off0"
        elif f.startswith("off"):
            pos = int(f[3:])
            self._off.append(tok - OFF_BASE)
            self._field = "off" + str(pos + 1) if pos < 5 else "vlabel"
        elif f == "vlabel":
            self._labels = [TopoLabel(tok - V_BASE)]
            self._advance_label_field()
        elif f == "flabel":
            self._labels.append(TopoLabel(int(TopoLabel.F0) + tok - F_BASE))
            self._advance_label_field()
        elif f == "elabel":
            self._labels.append(TopoLabel(int(TopoLabel.E0) + tok - E_BASE))
            self._advance_label_field()
        elif f == "mid":
            self._midpoint = tok == MID_TRUE
            self._finish_record()

    def _advance_label_field(self) -> None:
        assert self._layout is not None
        tri_ids, edge_ids, _ = self._layout
        have = len(self._labels)
        if have <= len(tri_ids):
            self._field = "flabel"
        elif have <= len(tri_ids) + len(edge_ids):
            self._field = "elabel"
        else:
            self._field = "mid"

    def _finish_record(self) -> None:
        offset = np.array(
            [
                _f16_value(self._off[i], self._off[3 + i])
                for i in range(3)
            ]
        )
        vs = VertexSplit(self._vsid, self._midpoint, offset, tuple(self._labels))
        if self._shared:
            self.complex = self.complex.copy()
            self._shared = False
        apply_vsplit(self.complex, vs)
        self.splits.append(vs)
        self._layout = None
        self._labels = []
        self._off = []
        self._field = "boundary"


def _safe_class(tok: int) -> str:
    try:
        return token_class(tok)
    except ValueError:
        return "invalid"


def phi(state: DecodeState, candidate: int) -> bool:
    """Validity oracle: may ``candidate`` extend the stream decoded so
    far?  Total over all ints."""
    if not 0 <= candidate < BASE_VOCAB:
        return False
    return candidate in state.admissible()


def decode_vsplit(tokens: Iterable[int], state: DecodeState) -> VertexSplit:
    """Consume exactly one record from ``tokens`` and return its split.

    The state must sit at a record boundary; the record is applied to the
    state's complex as a side effect.
    """
    if not state.at_boundary:
        raise TokenError("decode_vsplit needs a state at a record boundary")
    before = len(state.splits)
    for tok in tokens:
        if state.at_boundary and tok == EOS:
            raise TokenError("EOS where a record was expected")
        state.push(tok)
        if len(state.splits) > before:
            return state.splits[-1]
    raise TokenError("premature end of stream inside a record")


def encode_psc(psc: PSC) -> TokenStream:
    """Whole-stream encoding: BOS, one record per split, EOS.

    Replays the splits to derive each record's star layout; offsets are
    quantized to binary16 by the byte layout itself.
    """
    if psc.n_vertices > MAX_VERTICES:
        raise ValueError(
            f"{psc.n_vertices} vertices exceed the {MAX_VERTICES} limit of the two-byte index"
        )
    c = build_complex([psc.root_position])
    ids = [BOS]
    for vs in psc.splits:
        st = c.star(vs.vsid)
        ids.extend(encode_vsplit(vs, (len(st.triangles), len(st.edges))))
        apply_vsplit(c, vs)
    ids.append(EOS)
    return TokenStream(tuple(ids), base=True)


def decode_tokens(
    ids: Sequence[int], root_position=(0.0, 0.0, 0.0)
) -> tuple[PSC, SimplicialComplex]:
    """Parse a full base stream back into a PSC and its reconstruction.

    The stream does not carry the root position, so it must be supplied
    (the origin by default).
    """
    state = DecodeState(root_position)
    for tok in ids:
        state.push(tok)
    if not state.done:
        raise TokenError("stream ended without EOS")
    psc = PSC(np.asarray(root_position, dtype=np.float64), tuple(state.splits))
    return psc, state.complex
