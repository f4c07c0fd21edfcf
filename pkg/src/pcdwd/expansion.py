"""
Expanded information set.

Information bits that feed a frozen (or already expanded) position through
``T``, and information bits whose couple is frozen, have to be enumerated
over {0, 1} before the code splits into two independent half-length polar
cosets.  :func:`expanded_information_set` computes that set with the
two-phase fixpoint; :func:`expansion_sizes_batch` computes only its size for
many matrices at once and backs the equivalence-class search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .code import CodeSpec
from .gf2 import UnitUpperTriangularMatrix, popcount, support

__all__ = [
    "ExpansionResult",
    "couple",
    "expanded_information_set",
    "naive_closure",
    "baseline_expansion_size",
    "expansion_sizes_batch",
    "pack_rows",
    "ODD_POSITIONS",
]


def couple(i: int, N: int | None = None) -> int:
    """Index paired with ``i`` in the length-halving split: 2m-1 <-> 2m."""
    if i < 1 or (N is not None and i > N):
        raise IndexError(f"index {i} out of range")
    return i - 1 if i % 2 == 0 else i + 1


def _odd_positions(N: int) -> int:
    # bits 0, 2, 4, ... i.e. odd 1-based indices
    return int("01" * (N // 2), 2) if N >= 2 else 1


ODD_POSITIONS = _odd_positions


@dataclass(frozen=True)
class ExpansionResult:
    N: int
    expanded: frozenset[int]
    frozen_tilde: frozenset[int]
    info_tilde: frozenset[int]
    frozen_pairs: frozenset[int]
    info_pairs: frozenset[int]
    lam: int

    @property
    def fixed_mask(self) -> int:
        return sum(1 << (i - 1) for i in self.frozen_tilde)

    @property
    def assigned(self) -> list[int]:
        """Expanded information indices in increasing order (the enumeration order)."""
        return sorted(self.expanded)


def _derive(N: int, frozen_mask: int, info_mask: int, expanded_mask: int) -> ExpansionResult:
    fixed = frozen_mask | expanded_mask
    free = info_mask & ~expanded_mask
    frozen_pairs = frozenset(m for m in range(1, N // 2 + 1) if (fixed >> (2 * m - 2)) & 3 == 3)
    info_pairs = frozenset(m for m in range(1, N // 2 + 1) if (free >> (2 * m - 2)) & 3 == 3)
    return ExpansionResult(
        N=N,
        expanded=frozenset(support(expanded_mask)),
        frozen_tilde=frozenset(support(fixed)),
        info_tilde=frozenset(support(free)),
        frozen_pairs=frozen_pairs,
        info_pairs=info_pairs,
        lam=popcount(expanded_mask & info_mask),
    )


def expanded_information_set(code: CodeSpec, seed: frozenset[int] | None = None) -> ExpansionResult:
    """Run the backward-scan / couple-completion fixpoint.

    ``seed`` pre-populates the expanded set (used to check that the output is
    a fixpoint).  Only information indices are ever inserted: a frozen
    constrainer is already fixed at zero and is not enumerated.
    """
    N = code.N
    info_mask = code.info_mask
    frozen_mask = code.frozen_mask
    cols = code.T.column_masks
    P = 0
    for i in seed or ():
        P |= 1 << (i - 1)
    P &= info_mask
    Q = True
    while Q:
        for i in range(N, 0, -1):
            bit = 1 << (i - 1)
            if (frozen_mask | P) & bit:
                P |= cols[i - 1] & ~bit & info_mask
        Q = 0
        fixed = frozen_mask | P
        for m in range(1, N // 2 + 1):
            a = (fixed >> (2 * m - 2)) & 1
            b = (fixed >> (2 * m - 1)) & 1
            if a and not b:
                Q |= 1 << (2 * m - 1)
            elif b and not a:
                Q |= 1 << (2 * m - 2)
        P |= Q
    return _derive(N, frozen_mask, info_mask, P)


def naive_closure(code: CodeSpec) -> frozenset[int]:
    """Chaotic iteration of both closure rules in index order until nothing changes."""
    N = code.N
    info = code.info_set
    fixed = set(code.frozen_set)
    changed = True
    while changed:
        changed = False
        for j in range(1, N + 1):
            if j in fixed:
                continue
            hit = any(code.T.entry(j, i) for i in range(j + 1, N + 1) if i in fixed)
            if hit or couple(j) in fixed:
                fixed.add(j)
                changed = True
    return frozenset(fixed & info)


def baseline_expansion_size(code: CodeSpec) -> int:
    """Information bits up to the pair holding the largest frozen index.

    Counts ``i`` in the information set with ``i <= 2 * ceil(f / 2)`` where
    ``f`` is the largest frozen index, i.e. the frozen bit's couple is
    included.  Zero when nothing is frozen.
    """
    if not code.frozen_set:
        return 0
    last = max(code.frozen_set)
    bound = 2 * ((last + 1) // 2)
    return sum(1 for i in code.info_set if i <= bound)


# ---------------------------------------------------------------- batched kernel


def pack_rows(rows: Sequence[int], N: int) -> np.ndarray:
    """Packed Python-int rows -> ``(len(rows), W)`` uint64 words, little-endian."""
    W = max(1, (N + 63) // 64)
    out = np.zeros((len(rows), W), dtype=np.uint64)
    mask = (1 << 64) - 1
    for r, value in enumerate(rows):
        for w in range(W):
            out[r, w] = (value >> (64 * w)) & mask
    return out


def _mask_words(mask: int, N: int) -> np.ndarray:
    return pack_rows([mask], N)[0]


def expansion_sizes_batch(info_rows: np.ndarray, info_indices: Sequence[int], frozen_mask: int, N: int) -> np.ndarray:
    """Expanded-set sizes for a batch of matrices sharing one frozen set.

    ``info_rows`` has shape ``(B, K, W)``: for each of ``B`` matrices, the
    packed rows of the information indices ``info_indices`` (ascending).
    Rows of frozen indices never influence the result and are not needed.
    """
    info_rows = np.ascontiguousarray(info_rows, dtype=np.uint64)
    B, K, W = info_rows.shape
    info_indices = list(info_indices)
    if len(info_indices) != K:
        raise ValueError("info_indices does not match the row count")
    fixed = np.broadcast_to(_mask_words(frozen_mask, N), (B, W)).copy()
    info_words = _mask_words(sum(1 << (i - 1) for i in info_indices), N)
    odd = _mask_words(_odd_positions(N), N)
    even = odd << np.uint64(1)
    word_of = [(i - 1) // 64 for i in info_indices]
    bit_of = [np.uint64(1 << ((i - 1) % 64)) for i in info_indices]
    one = np.uint64(1)
    while True:
        for t in range(K - 1, -1, -1):
            hit = np.bitwise_and(info_rows[:, t, :], fixed).any(axis=1)
            if hit.any():
                fixed[hit, word_of[t]] |= bit_of[t]
        odd_fixed = fixed & odd
        even_fixed = (fixed >> one) & odd
        mixed = odd_fixed ^ even_fixed
        add = (mixed & ~odd_fixed) | (((mixed & ~even_fixed) << one) & even)
        if not add.any():
            break
        fixed |= add
    return np.bitwise_count(fixed & info_words).sum(axis=1).astype(np.int64)


def expansion_size(code: CodeSpec) -> int:
    """Size of the expanded set via the batched kernel (single matrix)."""
    idx = sorted(code.info_set)
    rows = pack_rows([code.T.rows[i - 1] for i in idx], code.N)[None, :, :]
    return int(expansion_sizes_batch(rows, idx, code.frozen_mask, code.N)[0])
