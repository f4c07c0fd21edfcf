"""
Exact weight distributions by parity-consistent decomposition.

After the expanded information bits are fixed, a pre-transformed polar code
is a disjoint union of polar cosets: sets ``{v G_N}`` where some positions
of ``v`` carry fixed values and the rest range freely.  Splitting ``v`` into
pairs ``(v_{2m-1}, v_{2m})`` maps a coset onto two half-length cosets whose
codewords interleave, so their spectra convolve.

Spectra are carried internally as single integers (Kronecker substitution):
the count of weight ``w`` occupies bits ``[w*B, (w+1)*B)`` with ``B`` one
more than the top-level length, which bounds every count.  Convolution is
then one big-integer product.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .code import CodeSpec
from .expansion import ExpansionResult, expanded_information_set
from .gf2 import BitVector, polar_transform, popcount, support

log = logging.getLogger(__name__)

__all__ = [
    "WeightDistribution",
    "PolarCosetSpec",
    "CosetAssignment",
    "ResourceLimitError",
    "ExpansionError",
    "PCDEngine",
    "EngineStats",
    "wd_convolve",
    "cache_key",
    "split_coset",
    "v_values",
    "polar_coset_wd",
    "compute_wd",
    "DEFAULT_MAX_LAMBDA",
]

DEFAULT_MAX_LAMBDA = 26


class ResourceLimitError(RuntimeError):
    pass


class ExpansionError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightDistribution:
    """``counts[w]`` codewords of Hamming weight ``w``, for ``w = 0..N``."""

    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if any(c < 0 for c in self.counts):
            raise ValueError("negative count")

    @property
    def N(self) -> int:
        return len(self.counts) - 1

    def __getitem__(self, w: int) -> int:
        return self.counts[w]

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def nonzero(self) -> list[tuple[int, int]]:
        return [(w, c) for w, c in enumerate(self.counts) if c]

    @classmethod
    def unit(cls, N: int, w: int) -> "WeightDistribution":
        counts = [0] * (N + 1)
        counts[w] = 1
        return cls(tuple(counts))

    @classmethod
    def from_packed(cls, packed: int, width: int, N: int) -> "WeightDistribution":
        mask = (1 << width) - 1
        counts = []
        for _ in range(N + 1):
            counts.append(packed & mask)
            packed >>= width
        if packed:
            raise ValueError("packed spectrum longer than N + 1 slots")
        return cls(tuple(counts))

    def packed(self, width: int) -> int:
        out = 0
        for w in range(len(self.counts) - 1, -1, -1):
            out = (out << width) | self.counts[w]
        return out

    def __add__(self, other: "WeightDistribution") -> "WeightDistribution":
        if len(other) != len(self):
            raise ValueError("length mismatch")
        return WeightDistribution(tuple(a + b for a, b in zip(self.counts, other.counts)))


def wd_convolve(a: WeightDistribution, b: WeightDistribution) -> WeightDistribution:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a.counts):
        if x:
            for j, y in enumerate(b.counts):
                out[i + j] += x * y
    return WeightDistribution(tuple(out))


@dataclass(frozen=True)
class PolarCosetSpec:
    """Coset of the length-``2^n`` polar code with some ``v`` positions fixed.

    Values outside the mask are zeroed on construction, so equal cosets have
    equal representations.
    """

    n: int
    frozen_mask: int
    frozen_values: int = 0

    def __post_init__(self):
        N = 1 << self.n
        if self.frozen_mask < 0 or self.frozen_mask >> N:
            raise ValueError("mask wider than the coset length")
        object.__setattr__(self, "frozen_values", self.frozen_values & self.frozen_mask)

    @property
    def N(self) -> int:
        return 1 << self.n

    @classmethod
    def from_bits(cls, mask: BitVector, values: BitVector) -> "PolarCosetSpec":
        if mask.length != values.length:
            raise ValueError("mask/value length mismatch")
        n = mask.length.bit_length() - 1
        return cls(n, mask.bits, values.bits)

    @property
    def free_count(self) -> int:
        return self.N - popcount(self.frozen_mask)


def cache_key(spec: PolarCosetSpec) -> bytes:
    nbytes = (spec.N + 7) // 8
    return (
        spec.n.to_bytes(2, "little")
        + spec.frozen_mask.to_bytes(nbytes, "little")
        + (spec.frozen_values & spec.frozen_mask).to_bytes(nbytes, "little")
    )


@dataclass(frozen=True)
class CosetAssignment:
    indices: tuple[int, ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.bits):
            raise ValueError("arity mismatch")

    @property
    def u_bits(self) -> int:
        return sum(1 << (i - 1) for i, b in zip(self.indices, self.bits) if b)


# ---------------------------------------------------------------- bit plumbing


@lru_cache(maxsize=None)
def _odd(N: int) -> int:
    return int("01" * (N // 2), 2) if N >= 2 else 1


@lru_cache(maxsize=None)
def _compactor(N: int) -> tuple[tuple[int, int], ...]:
    # gathers bits 0, 2, 4, ... of an N-bit word into the low N/2 bits
    steps = []
    shift = 1
    while 2 * shift <= N // 2:
        block = 4 * shift
        ones = (1 << (2 * shift)) - 1
        mask = 0
        for base in range(0, N, block):
            mask |= ones << base
        steps.append((shift, mask))
        shift *= 2
    return tuple(steps)


def _compact(x: int, N: int) -> int:
    x &= _odd(N)
    for shift, mask in _compactor(N):
        x = (x | (x >> shift)) & mask
    return x


def _pair_split(mask: int, values: int, N: int) -> tuple[int, int, int, int, int]:
    """Split a length-N coset into its two children.

    Returns ``(mask1, vals1, mask2, vals2, coupled)`` at length N/2.  A pair
    with a fixed odd member and a free even member is ``coupled``: its even
    member must be enumerated, and every set bit of the returned value toggles
    the same position in both children.  A free odd member with a fixed even
    member decouples (child 1 free, child 2 fixed) and needs no enumeration.
    """
    odd = _odd(N)
    mo = mask & odd
    me = (mask >> 1) & odd
    vo = values & odd
    ve = (values >> 1) & odd
    coupled = mo & ~me
    m1 = mo
    m2 = mo | me
    return (
        _compact(m1, N),
        _compact((vo ^ ve) & m1, N),
        _compact(m2, N),
        _compact(ve & m2, N),
        _compact(coupled, N),
    )


def split_coset(spec: PolarCosetSpec, assignment: dict[int, int] | None = None) -> tuple[PolarCosetSpec, PolarCosetSpec]:
    """Children of ``spec`` after its coupled free members receive ``assignment``.

    ``assignment`` maps each coupled free position (1-based, see
    :func:`coupled_positions`) to a bit.  For every fixed pair, child 1 gets
    ``v_{2m-1} ^ v_{2m}`` and child 2 gets ``v_{2m}``.
    """
    N = spec.N
    if N < 2:
        raise ValueError("cannot split a length-1 coset")
    assignment = assignment or {}
    coupled = coupled_positions(spec)
    missing = [p for p in coupled if p not in assignment]
    if missing:
        raise ValueError(f"mixed pair encountered: free positions {missing} are coupled to fixed partners")
    extra = set(assignment) - set(coupled)
    if extra:
        raise ValueError(f"positions {sorted(extra)} are not coupled free members")
    mask = spec.frozen_mask
    values = spec.frozen_values
    for p, bit in assignment.items():
        mask |= 1 << (p - 1)
        if bit:
            values |= 1 << (p - 1)
    m1, v1, m2, v2, _ = _pair_split(mask, values, N)
    return PolarCosetSpec(spec.n - 1, m1, v1), PolarCosetSpec(spec.n - 1, m2, v2)


def coupled_positions(spec: PolarCosetSpec) -> list[int]:
    """Free members (1-based) of pairs whose odd member is fixed and even member free."""
    N = spec.N
    odd = _odd(N)
    mo = spec.frozen_mask & odd
    me = (spec.frozen_mask >> 1) & odd
    return [p + 1 for p in support(mo & ~me)]


# ---------------------------------------------------------------- engine


@dataclass
class EngineStats:
    hits: int = 0
    misses: int = 0
    top_cosets: int = 0
    distinct_top_cosets: int = 0
    lam: int = 0
    elapsed: float = 0.0
    workers: int = 1

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0

    def merge(self, other: "EngineStats") -> None:
        self.hits += other.hits
        self.misses += other.misses

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "top_cosets": self.top_cosets,
            "distinct_top_cosets": self.distinct_top_cosets,
            "cache_hits": self.hits,
            "cache_misses": self.misses,
            "cache_hit_rate": round(self.hit_rate, 6),
            "elapsed_s": round(self.elapsed, 6),
            "workers": self.workers,
        }


class PCDEngine:
    """Recursive coset spectrum evaluator with a content-addressed memo.

    Parameters
    ----------
    top_length : int
        Length of the outermost code; fixes the packing slot width.
    use_cache : bool
        Disable to recompute every sub-coset (same results, slower).
    cutoff : int
        Cosets of length ``2^n`` with ``n <= cutoff`` are enumerated directly.
    """

    def __init__(self, top_length: int, use_cache: bool = True, cutoff: int = 2):
        self.width = top_length + 1
        self.top_length = top_length
        self.use_cache = use_cache
        self.cutoff = cutoff
        self.cache: dict[bytes, int] = {}
        self.stats = EngineStats()
        self._binomial: dict[int, int] = {}

    def to_wd(self, packed: int, N: int) -> WeightDistribution:
        return WeightDistribution.from_packed(packed, self.width, N)

    def coset(self, spec: PolarCosetSpec) -> int:
        if spec.N > self.top_length:
            raise ValueError("coset longer than the engine's top length")
        return self._coset(spec.n, spec.frozen_mask, spec.frozen_values & spec.frozen_mask)

    def _coset(self, n: int, mask: int, values: int) -> int:
        if self.use_cache:
            key = cache_key(PolarCosetSpec(n, mask, values))
            hit = self.cache.get(key)
            if hit is not None:
                self.stats.hits += 1
                return hit
            self.stats.misses += 1
        result = self._evaluate(n, mask, values)
        if self.use_cache:
            self.cache[key] = result
        return result

    def _evaluate(self, n: int, mask: int, values: int) -> int:
        N = 1 << n
        B = self.width
        full = (1 << N) - 1
        if mask == 0:
            packed = self._binomial.get(n)
            if packed is None:
                packed = self._binomial[n] = (1 + (1 << B)) ** N
            return packed
        if mask == full:
            return 1 << (B * popcount(polar_transform(values, n)))
        if n <= self.cutoff:
            free = full & ~mask
            acc = 0
            sub = free
            while True:
                acc += 1 << (B * popcount(polar_transform(values | sub, n)))
                if sub == 0:
                    break
                sub = (sub - 1) & free
            return acc
        m1, v1, m2, v2, coupled = _pair_split(mask, values, N)
        acc = 0
        sub = coupled
        while True:
            acc += self._coset(n - 1, m1, v1 ^ sub) * self._coset(n - 1, m2, v2 ^ sub)
            if sub == 0:
                break
            sub = (sub - 1) & coupled
        return acc


def polar_coset_wd(spec: PolarCosetSpec, engine: PCDEngine | None = None) -> WeightDistribution:
    engine = engine or PCDEngine(spec.N)
    return engine.to_wd(engine.coset(spec), spec.N)


# ---------------------------------------------------------------- top level


def v_values(code: CodeSpec, exp: ExpansionResult, assignment: CosetAssignment) -> BitVector:
    """``v = u T`` on the fixed positions, computed position by position.

    Positions outside the fixed set are left at zero.  A fixed position fed
    by a free information bit means the expansion was not closed.
    """
    N = code.N
    fixed = exp.fixed_mask
    u = assignment.u_bits
    if u & ~(code.info_mask & fixed):
        raise ValueError("assignment sets bits outside the expanded information set")
    free = code.info_mask & ~fixed
    cols = code.T.column_masks
    v = 0
    for i in range(1, N + 1):
        if not (fixed >> (i - 1)) & 1:
            continue
        col = cols[i - 1]
        if col & free:
            raise ExpansionError(f"fixed position {i} depends on free bits {support(col & free)}")
        if popcount(col & u) & 1:
            v |= 1 << (i - 1)
    return BitVector(N, v)


def _echelon(vectors: Iterable[int]) -> list[int]:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return basis


def _top_level_basis(code: CodeSpec, exp: ExpansionResult) -> tuple[int, int, list[int]]:
    """Child mask, half length, and a basis of the child-value space as ``c1 | c2 << half``."""
    N = code.N
    half = N // 2
    fixed = exp.fixed_mask
    odd = _odd(N)
    child_mask = _compact(fixed & odd, N)
    combined = []
    for j in exp.assigned:
        v = code.T.rows[j - 1] & fixed
        vo, ve = v & odd, (v >> 1) & odd
        combined.append(_compact(vo ^ ve, N) | (_compact(ve, N) << half))
    return child_mask, half, _echelon(combined)


def _sum_range(args) -> tuple[int, EngineStats]:
    n_child, child_mask, half, basis, start, stop, top_length, use_cache = args
    engine = PCDEngine(top_length, use_cache=use_cache)
    low = (1 << half) - 1
    acc = 0
    # Gray-code walk over span(basis), indices [start, stop)
    g = start ^ (start >> 1)
    V = 0
    for t, b in enumerate(basis):
        if (g >> t) & 1:
            V ^= b
    for idx in range(start, stop):
        acc += engine._coset(n_child, child_mask, V & low) * engine._coset(n_child, child_mask, V >> half)
        nxt = idx + 1
        if nxt < stop:
            flip = (nxt & -nxt).bit_length() - 1
            V ^= basis[flip]
    return acc, engine.stats


def compute_wd(
    code: CodeSpec,
    *,
    workers: int = 1,
    use_cache: bool = True,
    max_lambda: int = DEFAULT_MAX_LAMBDA,
    stats: EngineStats | None = None,
    expansion: ExpansionResult | None = None,
) -> WeightDistribution:
    """Exact weight distribution of ``code``.

    The expanded bits are enumerated through the linear map they induce on
    the two half-length child cosets; assignments with the same image give
    the same coset, so only the image space is walked, each image weighted
    by the size of the kernel.
    """
    t0 = time.perf_counter()
    exp = expansion or expanded_information_set(code)
    if exp.lam > max_lambda:
        raise ResourceLimitError(
            f"expanded information set has {exp.lam} bits (limit {max_lambda}); "
            "try the equivalence-class optimizer (--optimize) or raise the limit"
        )
    N = code.N
    stats = stats if stats is not None else EngineStats()
    stats.lam = exp.lam
    stats.top_cosets = 1 << exp.lam
    if N == 1:
        # single position: either free or frozen at zero
        packed = 0b1 if code.K == 0 else (1 | (1 << 2))
        stats.distinct_top_cosets = 1
        stats.elapsed = time.perf_counter() - t0
        return WeightDistribution.from_packed(packed, 2, 1)
    child_mask, half, basis = _top_level_basis(code, exp)
    rank = len(basis)
    stats.distinct_top_cosets = 1 << rank
    total = 1 << rank
    workers = max(1, min(workers, total))
    stats.workers = workers
    bounds = [total * w // workers for w in range(workers + 1)]
    jobs = [
        (code.n - 1, child_mask, half, basis, bounds[w], bounds[w + 1], N, use_cache)
        for w in range(workers)
        if bounds[w] < bounds[w + 1]
    ]
    if len(jobs) == 1:
        results = [_sum_range(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            results = list(pool.map(_sum_range, jobs))
    packed = 0
    for part, part_stats in results:
        packed += part
        stats.merge(part_stats)
    packed <<= exp.lam - rank
    stats.elapsed = time.perf_counter() - t0
    log.debug("wd N=%d K=%d lambda=%d rank=%d hit-rate=%.3f", N, code.K, exp.lam, rank, stats.hit_rate)
    return WeightDistribution.from_packed(packed, N + 1, N)
