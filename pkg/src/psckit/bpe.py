"""Byte-pair encoding over split-record token streams.

Merges never cross record boundaries, so the oracle can still delimit
records in compressed streams after expansion.  Records are
self-delimiting in the base vocabulary (BOS, EOS and the midpoint token
each close a segment), which lets the trainer segment a corpus without
replaying any geometry.

The trainer merges the most frequent adjacent pair, ties broken by
ascending (left, right), until the vocabulary is full or no pair repeats.
It keeps per-pair occurrence sets and a lazy max-heap, so cost scales
with tokens actually rewritten rather than corpus size times merges.
"""

from __future__ import annotations

import dataclasses
import heapq
from typing import Iterable, Sequence

from .tokenizer import BASE_VOCAB, BOS, EOS, MID_FALSE, MID_TRUE, PAD, TokenStream

MAX_VOCAB = 16384


@dataclasses.dataclass
class Vocabulary:
    """Ordered merge table; merge i defines id ``526 + i``."""

    merges: list[tuple[int, int]] = dataclasses.field(default_factory=list)

    def __post_init__(self):
        self.merge_index: dict[tuple[int, int], int] = {}
        self._expansion: dict[int, tuple[int, ...]] = {}
        for i, (l, r) in enumerate(self.merges):
            nid = BASE_VOCAB + i
            if l >= nid or r >= nid or l < 0 or r < 0:
                raise ValueError(f"merge {i} ({l}, {r}) references undefined ids")
            self.merge_index[(l, r)] = i
        if self.size > MAX_VOCAB:
            raise ValueError(f"vocabulary size {self.size} exceeds {MAX_VOCAB}")

    @property
    def size(self) -> int:
        return BASE_VOCAB + len(self.merges)

    def add(self, left: int, right: int) -> int:
        nid = BASE_VOCAB + len(self.merges)
        if nid >= MAX_VOCAB:
            raise ValueError("vocabulary full")
        self.merges.append((left, right))
        self.merge_index[(left, right)] = len(self.merges) - 1
        return nid

    def expand(self, tid: int) -> tuple[int, ...]:
        """Base-token expansion of any id."""
        if tid < BASE_VOCAB:
            return (tid,)
        if tid >= self.size:
            raise ValueError(f"unknown token id {tid} (vocabulary size {self.size})")
        cached = self._expansion.get(tid)
        if cached is None:
            l, r = self.merges[tid - BASE_VOCAB]
            cached = self.expand(l) + self.expand(r)
            self._expansion[tid] = cached
        return cached

    def to_text(self) -> str:
        lines = [f"{l} {r} {BASE_VOCAB + i}" for i, (l, r) in enumerate(self.merges)]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "Vocabulary":
        merges = []
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {ln}: expected 'left right new', got {line!r}")
            l, r, n = (int(p) for p in parts)
            if n != BASE_VOCAB + len(merges):
                raise ValueError(f"line {ln}: new id {n} out of sequence")
            merges.append((l, r))
        return cls(merges)


def _segments(ids: Sequence[int]) -> list[list[int]]:
    """Cut a base stream at record boundaries.

    BOS/EOS/PAD are their own segments; a midpoint token ends a record.
    """
    out: list[list[int]] = []
    cur: list[int] = []
    for tok in ids:
        if tok in (BOS, EOS, PAD):
            if cur:
                out.append(cur)
                cur = []
            out.append([tok])
        else:
            cur.append(tok)
            if tok in (MID_FALSE, MID_TRUE):
                out.append(cur)
                cur = []
    if cur:
        out.append(cur)
    return out


def bpe_train(corpus: Iterable[TokenStream | Sequence[int]], target: int = MAX_VOCAB) -> Vocabulary:
    """Train a merge table on base streams.

    Stops at ``target`` total vocabulary entries or as soon as no
    adjacent pair occurs twice.
    """
    if target > MAX_VOCAB:
        raise ValueError(f"target {target} exceeds {MAX_VOCAB}")
    tokens: list[int] = []
    walls: list[bool] = []  # True marks the last token of a segment
    n_streams = 0
    for stream in corpus:
        ids = stream.ids if isinstance(stream, TokenStream) else stream
        n_streams += 1
        for seg in _segments(ids):
            tokens.extend(seg)
            walls.extend([False] * (len(seg) - 1) + [True])
    if n_streams == 0:
        raise ValueError("empty corpus")

    vocab = Vocabulary()
    if target <= BASE_VOCAB or len(tokens) < 2:
        return vocab

    n = len(tokens)
    nxt = list(range(1, n)) + [-1]
    prv = [-1] + list(range(n - 1))
    alive = [True] * n

    counts: dict[tuple[int, int], int] = {}
    where: dict[tuple[int, int], set[int]] = {}
    for i in range(n - 1):
        if walls[i]:
            continue
        pair = (tokens[i], tokens[i + 1])
        counts[pair] = counts.get(pair, 0) + 1
        where.setdefault(pair, set()).add(i)

    heap = [(-c, p[0], p[1]) for p, c in counts.items()]
    heapq.heapify(heap)

    def drop_pair(left_pos: int, right_pos: int) -> None:
        pair = (tokens[left_pos], tokens[right_pos])
        c = counts.get(pair, 0) - 1
        if c > 0:
            counts[pair] = c
        else:
            counts.pop(pair, None)
        s = where.get(pair)
        if s is not None:
            s.discard(left_pos)

    def add_pair(left_pos: int, right_pos: int) -> None:
        pair = (tokens[left_pos], tokens[right_pos])
        counts[pair] = counts.get(pair, 0) + 1
        where.setdefault(pair, set()).add(left_pos)
        heapq.heappush(heap, (-counts[pair], pair[0], pair[1]))

    while vocab.size < target and heap:
        negc, l, r = heapq.heappop(heap)
        pair = (l, r)
        current = counts.get(pair, 0)
        if current != -negc:
            # stale entry: requeue at the true count so the pair is not lost
            if current >= 2:
                heapq.heappush(heap, (-current, l, r))
            continue
        if -negc < 2:
            break
        nid = vocab.add(l, r)
        for pos in sorted(where.pop(pair, ())):
            if not alive[pos] or tokens[pos] != l:
                continue
            j = nxt[pos]
            if j == -1 or not alive[j] or tokens[j] != r or walls[pos]:
                continue
            p = prv[pos]
            if p != -1 and not walls[p]:
                drop_pair(p, pos)
            k = nxt[j]
            if k != -1 and not walls[j]:
                drop_pair(j, k)
            tokens[pos] = nid
            walls[pos] = walls[j]
            alive[j] = False
            nxt[pos] = k
            if k != -1:
                prv[k] = pos
            if p != -1 and not walls[p]:
                add_pair(p, pos)
            if k != -1 and not walls[pos]:
                add_pair(pos, k)
        counts.pop(pair, None)
    return vocab


def _apply_segment(seg: list[int], vocab: Vocabulary) -> list[int]:
    while len(seg) >= 2:
        best = None
        for i in range(len(seg) - 1):
            m = vocab.merge_index.get((seg[i], seg[i + 1]))
            if m is not None and (best is None or m < best):
                best = m
        if best is None:
            break
        l, r = vocab.merges[best]
        nid = BASE_VOCAB + best
        out: list[int] = []
        i = 0
        while i < len(seg):
            if i + 1 < len(seg) and seg[i] == l and seg[i + 1] == r:
                out.append(nid)
                i += 2
            else:
                out.append(seg[i])
                i += 1
        seg = out
    return seg


def bpe_apply(ts: TokenStream, vocab: Vocabulary) -> TokenStream:
    """Compress a base stream; merges apply in training order within each
    record."""
    if not ts.base:
        raise ValueError("stream already compressed")
    out: list[int] = []
    for seg in _segments(ts.ids):
        out.extend(_apply_segment(seg, vocab))
    return TokenStream(tuple(out), base=False)


def bpe_decode(ts: TokenStream, vocab: Vocabulary) -> TokenStream:
    """Expand a compressed stream back to base tokens (exact inverse of
    bpe_apply)."""
    out: list[int] = []
    for tid in ts.ids:
        out.extend(vocab.expand(tid))
    return TokenStream(tuple(out), base=True)
