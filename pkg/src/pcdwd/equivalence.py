"""
Equivalence classes of pre-transformed polar codes.

Right-multiplying ``T`` by the Toeplitz matrix generated by kernel row
``g_j`` cyclically shifts every generator row by ``j - 1`` positions, so all
``N`` products share one weight distribution.  Their expanded information
sets differ, and the cheapest member is the one worth enumerating.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .code import CodeSpec, ReliabilitySequence, build_info_set, nr_reliability_sequence, random_upper_bool
from .expansion import (
    baseline_expansion_size,
    expansion_sizes_batch,
    pack_rows,
)
from .gf2 import BitVector, UnitUpperTriangularMatrix, kernel_row, mat_mul, shift_matrix

__all__ = [
    "CandidateRecord",
    "EquivalenceReport",
    "equivalence_class",
    "class_member",
    "optimize_pretransform",
    "recover_memory",
    "class_info_rows",
    "monte_carlo_reduction",
    "ReductionRow",
]


def class_member(code: CodeSpec, j: int) -> CodeSpec:
    """The code with ``T`` replaced by ``T T(g_j)``; information set unchanged."""
    return code.with_T(mat_mul(code.T, shift_matrix(kernel_row(code.n, j))))


def equivalence_class(code: CodeSpec) -> Iterator[CodeSpec]:
    for j in range(1, code.N + 1):
        yield class_member(code, j)


def recover_memory(T: UnitUpperTriangularMatrix) -> BitVector | None:
    """Generator of ``T`` if ``T`` is a truncated Toeplitz matrix, else ``None``."""
    N = T.size
    full = (1 << N) - 1
    first = T.rows[0]
    for k, row in enumerate(T.rows):
        if row != (first << k) & full:
            return None
    return BitVector(first.bit_length(), first)


# ---------------------------------------------------------------- batched class rows


def _shift_left(x: np.ndarray, s: int, N: int) -> np.ndarray:
    W = x.shape[-1]
    q, r = divmod(s, 64)
    y = np.zeros_like(x)
    if q < W:
        y[..., q:] = x[..., : W - q]
    if r:
        carry = y[..., :-1] >> np.uint64(64 - r)
        y <<= np.uint64(r)
        y[..., 1:] |= carry
    if N < 64:
        y &= np.uint64((1 << N) - 1)
    return y


def class_info_rows(rows: np.ndarray, N: int) -> np.ndarray:
    """Rows of ``T T(g_j)`` for every ``j``.

    ``rows`` is ``(..., W)`` packed rows of ``T``; the result has a new
    leading axis of length ``N`` indexed by ``j - 1``.  Uses
    ``g_j(x) = prod over set bits b of (j-1) of (1 + x^(2^b))``, so each
    member is its parent (``j - 1`` with the top bit cleared) plus one
    shifted copy.
    """
    out = np.empty((N,) + rows.shape, dtype=np.uint64)
    out[0] = rows
    for m in range(1, N):
        top = m.bit_length() - 1
        parent = out[m ^ (1 << top)]
        out[m] = parent ^ _shift_left(parent, 1 << top, N)
    return out


# ---------------------------------------------------------------- optimizer


@dataclass(frozen=True)
class CandidateRecord:
    j: int
    lam: int
    memory: BitVector | None = None


@dataclass(frozen=True)
class EquivalenceReport:
    candidates: tuple[CandidateRecord, ...]
    j_star: int
    baseline: int
    tie_break: str = "smallest-j"

    @property
    def lam_original(self) -> int:
        return self.candidates[0].lam

    @property
    def lam_star(self) -> int:
        return self.candidates[self.j_star - 1].lam

    @property
    def memory_star(self) -> BitVector | None:
        return self.candidates[self.j_star - 1].memory

    def as_dict(self) -> dict:
        return {
            "n1": self.baseline,
            "n2": self.lam_original,
            "n3": self.lam_star,
            "j_star": self.j_star,
            "tie_break": self.tie_break,
            "memory_star": self.memory_star.to_string() if self.memory_star else None,
        }


def optimize_pretransform(code: CodeSpec, with_memory: bool = True) -> EquivalenceReport:
    """Expanded-set size of every class member; pick the smallest, first ``j`` on ties."""
    N = code.N
    info = sorted(code.info_set)
    base = pack_rows([code.T.rows[i - 1] for i in info], N)
    cand = class_info_rows(base, N)
    lams = expansion_sizes_batch(cand, info, code.frozen_mask, N)
    j_star = int(np.argmin(lams)) + 1  # argmin returns the first minimum
    records = []
    for j in range(1, N + 1):
        memory = None
        if with_memory and j in (1, j_star):
            memory = recover_memory(class_member(code, j).T)
        records.append(CandidateRecord(j, int(lams[j - 1]), memory))
    return EquivalenceReport(tuple(records), j_star, baseline_expansion_size(code))


# ---------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class ReductionRow:
    N: int
    K: int
    samples: int
    n1: int
    r1: float
    r2: float
    mean_n2: float
    mean_n3: float

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "K": self.K,
            "samples": self.samples,
            "n1": self.n1,
            "r1": self.r1,
            "r2": self.r2,
            "mean_n2": self.mean_n2,
            "mean_n3": self.mean_n3,
        }


def _sample_info_rows(N: int, info: Sequence[int], density: float, seed: int, K: int, s: int) -> np.ndarray:
    # sample s equals RandomUpper(density, seed=(seed, K, s)) built at length N
    draws = random_upper_bool(np.random.default_rng((seed, K, s)), N, density)
    sel = draws[[i - 1 for i in info]]
    W = max(1, (N + 63) // 64)
    padded = np.zeros((len(info), W * 64), dtype=bool)
    padded[:, :N] = sel
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(np.uint64)


def monte_carlo_reduction(
    N: int,
    Ks: Sequence[int],
    samples: int,
    seed: int = 0,
    density: float = 0.5,
    seq: ReliabilitySequence | None = None,
    chunk: int | None = None,
    progress=None,
) -> list[ReductionRow]:
    """Fraction of random pre-transformed codes whose expanded set beats the baseline.

    ``r1`` counts codes whose own expanded set is strictly smaller than the
    baseline; ``r2`` counts codes for which some class member is.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    seq = seq or nr_reliability_sequence()
    rows = []
    for K in Ks:
        info_set, frozen_set = build_info_set(seq, N, K)
        info = sorted(info_set)
        frozen_mask = sum(1 << (i - 1) for i in frozen_set)
        n1 = baseline_expansion_size(CodeSpec(N.bit_length() - 1, info_set, None, frozen_set))
        W = max(1, (N + 63) // 64)
        per_sample = N * max(K, 1) * W
        step = chunk or max(1, min(samples, 4_000_000 // per_sample))
        better_own = better_any = 0
        sum_n2 = sum_n3 = 0
        for start in range(0, samples, step):
            stop = min(samples, start + step)
            batch = np.stack([_sample_info_rows(N, info, density, seed, K, s) for s in range(start, stop)])
            cand = class_info_rows(batch, N)  # (N, S, K, W)
            S = stop - start
            lams = expansion_sizes_batch(cand.reshape(N * S, K, W), info, frozen_mask, N).reshape(N, S)
            own = lams[0]
            best = lams.min(axis=0)
            better_own += int((own < n1).sum())
            better_any += int((best < n1).sum())
            sum_n2 += int(own.sum())
            sum_n3 += int(best.sum())
            if progress:
                progress(K, stop, samples)
        rows.append(
            ReductionRow(
                N=N,
                K=K,
                samples=samples,
                n1=n1,
                r1=better_own / samples,
                r2=better_any / samples,
                mean_n2=sum_n2 / samples,
                mean_n3=sum_n3 / samples,
            )
        )
    return rows
