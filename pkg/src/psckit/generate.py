"""Constrained sampling of valid split streams.

A scorer assigns finite scores to candidate tokens given the prefix; the
generator perturbs scores with Gumbel noise (so a uniform scorer yields a
uniformly random valid choice), orders candidates descending, and does a
depth-first traversal: on a dead end it backtracks to the nearest
ancestor with untried candidates.  Every emitted token passes the oracle
by construction, and the traversal always terminates with a complete,
decodable stream.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .complex import SimplicialComplex
from .tokenizer import EOS, DecodeState, TokenStream

Scorer = Callable[[Sequence[int], Sequence[int]], Sequence[float]]


def uniform_scorer(prefix: Sequence[int], candidates: Sequence[int]) -> Sequence[float]:
    """Scores every candidate equally; with Gumbel noise this samples
    uniformly among valid tokens."""
    return [0.0] * len(candidates)


def constrained_generate(
    scorer: Scorer = uniform_scorer,
    seed: int = 0,
    max_splits: int = 16,
    root_position=(0.0, 0.0, 0.0),
) -> tuple[TokenStream, SimplicialComplex]:
    """Sample one valid token stream and its reconstructed complex.

    ``max_splits`` caps the number of refinement records; at the cap only
    EOS remains admissible.  Deterministic for a fixed seed and scorer.
    """
    if max_splits < 0:
        raise ValueError(f"max_splits must be >= 0, got {max_splits}")
    rng = np.random.default_rng(seed)

    def ordered_candidates(state: DecodeState, prefix: list[int]) -> list[int]:
        cands = sorted(state.admissible())
        if state.at_boundary and len(state.splits) >= max_splits:
            cands = [t for t in cands if t == EOS]
        if not cands:
            return []
        scores = np.asarray(scorer(tuple(prefix), tuple(cands)), dtype=np.float64)
        if scores.shape != (len(cands),) or not np.all(np.isfinite(scores)):
            raise ValueError("scorer must return one finite score per candidate")
        noisy = scores + rng.gumbel(size=len(cands))
        order = np.argsort(-noisy, kind="stable")
        return [cands[i] for i in order]

    root = DecodeState(root_position)
    stack: list[tuple[DecodeState, list[int], int]] = [(root, ordered_candidates(root, []), 0)]
    tokens: list[int] = []

    while stack:
        state, cands, tried = stack[-1]
        if state.done:
            return TokenStream(tuple(tokens), base=True), state.complex
        if tried >= len(cands):
            # dead end: back up to the nearest ancestor with options left
            stack.pop()
            if tokens:
                tokens.pop()
            continue
        stack[-1] = (state, cands, tried + 1)
        child = state.copy()
        child.push(cands[tried])
        tokens.append(cands[tried])
        stack.append((child, ordered_candidates(child, tokens), 0))

    raise RuntimeError("generation exhausted the search tree from the root")
