"""
Pre-transformed polar code construction.

A :class:`CodeSpec` bundles the block length, the information/frozen split
and the pre-transformation matrix ``T``; codewords are ``u T G_N`` with the
frozen entries of ``u`` equal to zero.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Sequence

import numpy as np

from .gf2 import (
    BitVector,
    UnitUpperTriangularMatrix,
    identity_matrix,
    shift_matrix,
)

__all__ = [
    "CodeSpec",
    "ReliabilitySequence",
    "PretransformRecipe",
    "Identity",
    "PAC",
    "ParityCheck",
    "CRC",
    "RandomUpper",
    "Explicit",
    "load_reliability_sequence",
    "nr_reliability_sequence",
    "build_info_set",
    "build_pretransform",
    "make_code",
    "validate",
    "crc_remainder",
    "random_upper_rows",
    "random_upper_bool",
    "DEFAULT_PARITY_TAPS",
    "DEFAULT_PAC_MEMORY",
]

DEFAULT_PARITY_TAPS = (3, 5, 6)
DEFAULT_PAC_MEMORY = "10101011"


class ReliabilityError(ValueError):
    pass


@dataclass(frozen=True)
class ReliabilitySequence:
    """1-based channel indices ordered from least to most reliable."""

    order: tuple[int, ...]

    def __post_init__(self):
        n_max = len(self.order)
        seen = set()
        for idx in self.order:
            if not 1 <= idx <= n_max:
                raise ReliabilityError(f"index {idx} outside [1, {n_max}]")
            if idx in seen:
                raise ReliabilityError(f"duplicate index {idx}")
            seen.add(idx)

    @property
    def max_length(self) -> int:
        return len(self.order)

    def restrict(self, N: int) -> tuple[int, ...]:
        out = tuple(i for i in self.order if i <= N)
        if len(out) != N:
            raise ReliabilityError(f"sequence does not cover [1, {N}]")
        return out


def load_reliability_sequence(stream: IO | str | bytes, max_length: int | None = None) -> ReliabilitySequence:
    """Parse whitespace-separated 0-based indices (least reliable first).

    ``max_length`` restricts to indices below it (and then requires exactly
    that many entries); without it the whole file must be a permutation.
    """
    if isinstance(stream, bytes):
        text = stream.decode()
    elif isinstance(stream, str):
        text = stream
    else:
        text = stream.read()
        if isinstance(text, bytes):
            text = text.decode()
    values = []
    for tok in text.split():
        try:
            values.append(int(tok))
        except ValueError:
            raise ReliabilityError(f"non-integer token {tok!r}") from None
    if max_length is not None:
        values = [v for v in values if v < max_length]
        if len(values) != max_length:
            raise ReliabilityError(f"expected {max_length} indices below {max_length}, got {len(values)}")
    return ReliabilitySequence(tuple(v + 1 for v in values))


def nr_reliability_sequence() -> ReliabilitySequence:
    """The 1024-entry 5G NR polar sequence (TS 38.212 Table 5.3.1.2-1)."""
    text = resources.files("pcdwd").joinpath("data/nr_polar_sequence.txt").read_text()
    return load_reliability_sequence(io.StringIO(text))


def build_info_set(seq: ReliabilitySequence, N: int, K: int) -> tuple[frozenset[int], frozenset[int]]:
    """The K most reliable indices in [1, N] and their complement."""
    if not 0 <= K <= N:
        raise ValueError(f"K={K} must lie in [0, N={N}]")
    order = seq.restrict(N)
    info = frozenset(order[N - K:])
    return info, frozenset(range(1, N + 1)) - info


# ---------------------------------------------------------------- recipes


@dataclass(frozen=True)
class Identity:
    kind = "identity"


@dataclass(frozen=True)
class PAC:
    memory: BitVector
    kind = "pac"

    def __post_init__(self):
        if not self.memory.bits & 1:
            raise ValueError("PAC memory must start with 1")


@dataclass(frozen=True)
class ParityCheck:
    taps: tuple[int, ...] = DEFAULT_PARITY_TAPS
    positions: frozenset[int] | None = None  # None: every frozen index
    kind = "parity_check"

    def __post_init__(self):
        if any(d <= 0 for d in self.taps):
            raise ValueError("parity taps must be positive back-offsets")


@dataclass(frozen=True)
class CRC:
    polynomial: BitVector  # highest degree first, e.g. 1011 = x^3 + x + 1
    kind = "crc"

    def __post_init__(self):
        if self.polynomial.length < 2 or not self.polynomial[1] or not self.polynomial[self.polynomial.length]:
            raise ValueError("CRC polynomial needs degree >= 1 and nonzero leading/constant terms")

    @property
    def degree(self) -> int:
        return self.polynomial.length - 1


@dataclass(frozen=True)
class RandomUpper:
    density: float = 0.5
    seed: int | tuple[int, ...] = 0
    kind = "random"

    def __post_init__(self):
        if not 0 <= self.density <= 1:
            raise ValueError("density must lie in [0, 1]")


@dataclass(frozen=True)
class Explicit:
    matrix: UnitUpperTriangularMatrix
    kind = "explicit"


PretransformRecipe = Identity | PAC | ParityCheck | CRC | RandomUpper | Explicit


def crc_remainder(payload: Sequence[int], poly: BitVector) -> list[int]:
    """CRC bits of ``payload`` by shift-register long division, first bit highest degree."""
    r = poly.length - 1
    taps = poly.to_list()[1:]
    reg = [0] * r
    for bit in payload:
        fb = bit ^ reg[0]
        reg = reg[1:] + [0]
        if fb:
            reg = [a ^ t for a, t in zip(reg, taps)]
    return reg


def random_upper_bool(rng: np.random.Generator, N: int, density: float) -> np.ndarray:
    """Boolean ``(N, N)`` matrix: unit diagonal, i.i.d. Bernoulli(density) strictly above it."""
    draws = np.triu(rng.random((N, N)) < density, 1)
    draws[np.arange(N), np.arange(N)] = True
    return draws


def random_upper_rows(rng: np.random.Generator, N: int, density: float) -> tuple[int, ...]:
    draws = random_upper_bool(rng, N, density)
    packed = np.packbits(draws, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


def _crc_layout(info: Iterable[int], r: int) -> tuple[list[int], list[int]]:
    ordered = sorted(info)
    if r > len(ordered):
        raise ValueError(f"CRC degree {r} exceeds the number of information positions {len(ordered)}")
    return ordered[: len(ordered) - r], ordered[len(ordered) - r:]


def build_pretransform(recipe, N: int, info: Iterable[int] = (), frozen: Iterable[int] = ()) -> UnitUpperTriangularMatrix:
    info = frozenset(info)
    frozen = frozenset(frozen)
    if isinstance(recipe, Identity):
        return identity_matrix(N)
    if isinstance(recipe, PAC):
        mem = recipe.memory
        padded = BitVector(N, mem.bits & ((1 << N) - 1))
        return shift_matrix(padded)
    if isinstance(recipe, ParityCheck):
        rows = [1 << k for k in range(N)]
        positions = frozen if recipe.positions is None else recipe.positions
        for i in positions:
            for d in recipe.taps:
                if i - d >= 1:
                    rows[i - d - 1] |= 1 << (i - 1)
        return UnitUpperTriangularMatrix(N, tuple(rows))
    if isinstance(recipe, CRC):
        payload, crc_pos = _crc_layout(info, recipe.degree)
        rows = [1 << k for k in range(N)]
        for t, j in enumerate(payload):
            unit = [0] * len(payload)
            unit[t] = 1
            for bit, c in zip(crc_remainder(unit, recipe.polynomial), crc_pos):
                if bit:
                    rows[j - 1] |= 1 << (c - 1)
        return UnitUpperTriangularMatrix(N, tuple(rows))
    if isinstance(recipe, RandomUpper):
        rng = np.random.default_rng(recipe.seed)
        return UnitUpperTriangularMatrix(N, random_upper_rows(rng, N, recipe.density))
    if isinstance(recipe, Explicit):
        if recipe.matrix.size != N:
            raise ValueError(f"explicit matrix has size {recipe.matrix.size}, expected {N}")
        return recipe.matrix
    raise TypeError(f"unknown pretransform recipe {recipe!r}")


# ---------------------------------------------------------------- the code


@dataclass(frozen=True)
class CodeSpec:
    n: int
    info_set: frozenset[int]
    T: UnitUpperTriangularMatrix
    frozen_set: frozenset[int] = field(default=None)

    def __post_init__(self):
        # T is validated by validate(), not here, so malformed codes can be reported
        object.__setattr__(self, "info_set", frozenset(self.info_set))
        if self.frozen_set is None:
            object.__setattr__(self, "frozen_set", frozenset(range(1, self.N + 1)) - self.info_set)
        else:
            object.__setattr__(self, "frozen_set", frozenset(self.frozen_set))

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def info_mask(self) -> int:
        return sum(1 << (i - 1) for i in self.info_set)

    @property
    def frozen_mask(self) -> int:
        return sum(1 << (i - 1) for i in self.frozen_set)

    def with_T(self, T: UnitUpperTriangularMatrix) -> "CodeSpec":
        return CodeSpec(self.n, self.info_set, T, self.frozen_set)

    def __repr__(self) -> str:
        return f"CodeSpec(N={self.N}, K={self.K})"


def make_code(n: int, recipe=None, *, K: int | None = None, frozen: Iterable[int] | None = None,
              seq: ReliabilitySequence | None = None) -> CodeSpec:
    """Build a code from either an explicit frozen set or a reliability sequence plus K.

    With a CRC recipe the CRC positions become dynamically frozen: they stay
    zero in ``u`` and receive their parity through ``T``, so the returned
    code's dimension is the payload size ``K - deg(poly)``.
    """
    N = 1 << n
    if frozen is not None:
        frozen = frozenset(frozen)
        info = frozenset(range(1, N + 1)) - frozen
    else:
        if K is None:
            raise ValueError("either frozen or K is required")
        info, frozen = build_info_set(seq or nr_reliability_sequence(), N, K)
    recipe = recipe or Identity()
    T = build_pretransform(recipe, N, info, frozen)
    if isinstance(recipe, CRC):
        payload, crc_pos = _crc_layout(info, recipe.degree)
        info = frozenset(payload)
        frozen = frozen | frozenset(crc_pos)
    code = CodeSpec(n, info, T, frozen)
    report = validate(code)
    if report is not None:
        raise ValueError(report)
    return code


def validate(code: CodeSpec) -> str | None:
    """Return ``None`` for a well-formed code, otherwise a description of the first violation."""
    try:
        N = 1 << code.n
    except TypeError:
        return "n is not an integer"
    if code.n < 0:
        return "n is negative"
    universe = frozenset(range(1, N + 1))
    if code.info_set & code.frozen_set:
        return f"overlap: {sorted(code.info_set & code.frozen_set)} are both information and frozen"
    if code.info_set | code.frozen_set != universe:
        return "coverage: information and frozen sets do not cover [1, N]"
    T = code.T
    if not hasattr(T, "rows") or not hasattr(T, "size"):
        return "T is not a matrix"
    if T.size != N:
        return f"size: T is {T.size}x{T.size}, expected {N}"
    for k, row in enumerate(T.rows):
        if row & ((1 << k) - 1):
            return f"not upper triangular: row {k + 1} has an entry below the diagonal"
        if not (row >> k) & 1:
            return f"not unit diagonal: entry ({k + 1},{k + 1}) is 0"
    return None
