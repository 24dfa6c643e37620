"""Byte-level codecs: the PSC container and the token container.

Both formats are little-endian regardless of host so fixture files are
portable.  Readers report the byte offset of whatever they choked on.
"""

from __future__ import annotations

import struct

import numpy as np

from .psc import PSC, TopoLabel, VertexSplit

PSC_MAGIC = b"PSC1"
PSC_VERSION = 1
FLAG_QUANTIZED = 0x0001

TOKEN_MAGIC = b"PSCT"
TOKEN_VERSION = 1
TOKEN_BASE_VOCAB = 526

FLAG_MIDPOINT = 0x01


class FormatError(ValueError):
    """Malformed container; ``offset`` points at the offending byte."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(f"truncated stream while reading {what}", self.pos)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def write_psc(psc: PSC, quantized: bool = False) -> bytes:
    """Serialize a PSC; ``quantized`` stores offsets as binary16."""
    n = psc.n_vertices
    if n > 0xFFFFFFFF:
        raise ValueError(f"vertex count {n} exceeds u32")
    flags = FLAG_QUANTIZED if quantized else 0
    out = bytearray()
    out += PSC_MAGIC
    out += struct.pack("<HHI", PSC_VERSION, flags, n)
    out += struct.pack("<3d", *psc.root_position)
    for vs in psc.splits:
        out += struct.pack("<IB", vs.vsid, FLAG_MIDPOINT if vs.midpoint else 0)
        if quantized:
            out += np.asarray(vs.offset, dtype=np.float16).astype("<f2").tobytes()
        else:
            out += struct.pack("<3d", *vs.offset)
        out += struct.pack("<H", len(vs.labels))
        out += bytes(int(l) for l in vs.labels)
    return bytes(out)


def read_psc(data: bytes) -> PSC:
    r = _Reader(data)
    magic = r.take(4, "magic")
    if magic != PSC_MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    version, flags, n = r.unpack("<HHI", "header")
    if version != PSC_VERSION:
        raise FormatError(f"unknown version {version}", 4)
    quantized = bool(flags & FLAG_QUANTIZED)
    root = np.array(r.unpack("<3d", "root position"))
    splits = []
    for i in range(n - 1):
        vsid, rec_flags = r.unpack("<IB", f"record {i} header")
        if quantized:
            off_at = r.pos
            raw = r.take(6, f"record {i} offset")
            offset = np.frombuffer(raw, dtype="<f2").astype(np.float64)
            if not np.all(np.isfinite(offset)):
                raise FormatError(f"non-finite offset in record {i}", off_at)
        else:
            offset = np.array(r.unpack("<3d", f"record {i} offset"))
        (count,) = r.unpack("<H", f"record {i} label count")
        label_at = r.pos
        raw_labels = r.take(count, f"record {i} labels")
        labels = []
        for j, byte in enumerate(raw_labels):
            if byte > 8:
                raise FormatError(f"label byte {byte} > 8 in record {i}", label_at + j)
            labels.append(TopoLabel(byte))
        splits.append(
            VertexSplit(vsid, bool(rec_flags & FLAG_MIDPOINT), offset, tuple(labels))
        )
    if r.pos != len(data):
        raise FormatError(f"{len(data) - r.pos} trailing bytes", r.pos)
    return PSC(root, tuple(splits))


def write_tokens(ids) -> bytes:
    out = bytearray()
    out += TOKEN_MAGIC
    out += struct.pack("<HHQ", TOKEN_VERSION, TOKEN_BASE_VOCAB, len(ids))
    for tid in ids:
        if not 0 <= tid <= 0xFFFFFFFF:
            raise ValueError(f"token id {tid} out of u32 range")
        out += struct.pack("<I", tid)
    return bytes(out)


def read_tokens(data: bytes) -> list[int]:
    r = _Reader(data)
    magic = r.take(4, "magic")
    if magic != TOKEN_MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    version, base, count = r.unpack("<HHQ", "header")
    if version != TOKEN_VERSION:
        raise FormatError(f"unknown version {version}", 4)
    if base != TOKEN_BASE_VOCAB:
        raise FormatError(f"unexpected base vocabulary {base}", 6)
    ids = []
    for i in range(count):
        (tid,) = r.unpack("<I", f"token {i}")
        ids.append(tid)
    if r.pos != len(data):
        raise FormatError(f"{len(data) - r.pos} trailing bytes", r.pos)
    return ids
