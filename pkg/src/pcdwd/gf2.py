"""
GF(2) vectors, unit upper-triangular matrices and the polar kernel algebra.

Vectors are packed into Python integers: domain index ``i`` (1-based) lives
at bit ``i - 1``.  Every GF(2) sum is therefore a single XOR, which keeps
row combination cheap even at N = 1024.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "BitVector",
    "UnitUpperTriangularMatrix",
    "kernel_row",
    "kernel_row_bits",
    "kernel_matrix_explicit",
    "cyclic_shift",
    "truncated_convolution",
    "basis_expansion",
    "lemma1_row_sum",
    "shift_matrix",
    "identity_matrix",
    "mat_mul",
    "encode",
    "polar_transform",
    "clmul",
    "popcount",
    "support",
    "log2_length",
]


def popcount(x: int) -> int:
    return x.bit_count() if hasattr(x, "bit_count") else bin(x).count("1")


def support(x: int) -> list[int]:
    """1-based positions of the set bits of a packed vector."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length())
        x ^= low
    return out


def log2_length(N: int) -> int:
    if N <= 0 or N & (N - 1):
        raise ValueError(f"length must be a power of two, got {N}")
    return N.bit_length() - 1


def clmul(a: int, b: int, width: int | None = None) -> int:
    """Carry-less (GF(2) polynomial) product, optionally truncated to ``width`` bits."""
    if popcount(a) < popcount(b):
        a, b = b, a
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    if width is not None:
        out &= (1 << width) - 1
    return out


@dataclass(frozen=True)
class BitVector:
    """Fixed-length vector over GF(2) with 1-based indexing."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits do not fit in the declared length")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVector":
        bits = 0
        for pos, b in enumerate(values):
            if b not in (0, 1):
                raise ValueError(f"entry {pos + 1} is not a bit: {b!r}")
            if b:
                bits |= 1 << pos
        return cls(len(values), bits)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Parse a bit string written first-entry-first, e.g. ``"10101011"``."""
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_list([int(c) for c in text])

    @classmethod
    def from_support(cls, length: int, indices: Iterable[int]) -> "BitVector":
        bits = 0
        for i in indices:
            if not 1 <= i <= length:
                raise IndexError(f"index {i} outside [1, {length}]")
            bits |= 1 << (i - 1)
        return cls(length, bits)

    @classmethod
    def unit(cls, length: int, i: int) -> "BitVector":
        return cls.from_support(length, [i])

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise IndexError(f"index {i} outside [1, {self.length}]")
        return (self.bits >> (i - 1)) & 1

    def __len__(self) -> int:
        return self.length

    def __iter__(self):
        for pos in range(self.length):
            yield (self.bits >> pos) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if not isinstance(other, BitVector):
            return NotImplemented
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits ^ other.bits)

    __add__ = __xor__

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def support(self) -> list[int]:
        return support(self.bits)

    def to_list(self) -> list[int]:
        return list(self)

    def to_string(self) -> str:
        return "".join(str(b) for b in self)

    def __repr__(self) -> str:
        return f"BitVector({self.to_string()})"


@dataclass(frozen=True)
class UnitUpperTriangularMatrix:
    """Square GF(2) matrix with unit diagonal and zeros below it.

    ``rows[k]`` is the packed row ``k + 1``.  Construction validates the
    triangular structure, so every instance satisfies the invariants.
    """

    size: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.size:
            raise ValueError(f"expected {self.size} rows, got {len(self.rows)}")
        for k, row in enumerate(self.rows):
            if row < 0 or row >> self.size:
                raise ValueError(f"row {k + 1} does not fit in {self.size} columns")
            if not (row >> k) & 1:
                raise ValueError(f"diagonal entry ({k + 1},{k + 1}) is 0")
            if row & ((1 << k) - 1):
                raise ValueError(f"row {k + 1} has an entry below the diagonal")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "UnitUpperTriangularMatrix":
        packed = tuple(BitVector.from_list(r).bits for r in rows)
        for r in rows:
            if len(r) != len(rows):
                raise ValueError("matrix is not square")
        return cls(len(rows), packed)

    def entry(self, j: int, i: int) -> int:
        """Entry ``T_{j,i}`` (row j, column i), 1-based."""
        return (self.rows[j - 1] >> (i - 1)) & 1

    def row(self, j: int) -> BitVector:
        return BitVector(self.size, self.rows[j - 1])

    @property
    def column_masks(self) -> tuple[int, ...]:
        """Packed columns; ``column_masks[i-1]`` has bit ``j-1`` set iff ``T_{j,i} = 1``."""
        cols = [0] * self.size
        for j, row in enumerate(self.rows):
            for i in support(row):
                cols[i - 1] |= 1 << j
        return tuple(cols)

    def to_lists(self) -> list[list[int]]:
        return [BitVector(self.size, r).to_list() for r in self.rows]

    def is_identity(self) -> bool:
        return all(row == 1 << k for k, row in enumerate(self.rows))

    def __matmul__(self, other: "UnitUpperTriangularMatrix") -> "UnitUpperTriangularMatrix":
        return mat_mul(self, other)


def identity_matrix(N: int) -> UnitUpperTriangularMatrix:
    return UnitUpperTriangularMatrix(N, tuple(1 << k for k in range(N)))


def kernel_matrix_explicit(n: int) -> list[int]:
    """Rows of the n-th Kronecker power of [[1,0],[1,1]], built by block recursion."""
    rows = [1]
    width = 1
    for _ in range(n):
        # [[G, 0], [G, G]]
        rows = rows + [r | (r << width) for r in rows]
        width *= 2
    return rows


@lru_cache(maxsize=None)
def kernel_row_bits(n: int, i: int) -> int:
    """Packed row ``g_i`` of the kernel power: bit ``j-1`` set iff ``(j-1)`` is a submask of ``(i-1)``."""
    N = 1 << n
    if not 1 <= i <= N:
        raise IndexError(f"row index {i} outside [1, {N}]")
    m = i - 1
    bits = 0
    sub = m
    while True:
        bits |= 1 << sub
        if sub == 0:
            break
        sub = (sub - 1) & m
    return bits


def kernel_row(n: int, i: int) -> BitVector:
    return BitVector(1 << n, kernel_row_bits(n, i))


def cyclic_shift(u: BitVector, s: int) -> BitVector:
    """Cyclic right shift by ``s`` positions."""
    N = u.length
    s %= N
    if s == 0:
        return u
    mask = (1 << N) - 1
    return BitVector(N, ((u.bits << s) | (u.bits >> (N - s))) & mask)


def truncated_convolution(u: BitVector, v: BitVector, N: int | None = None) -> BitVector:
    """First ``N`` coefficients of the GF(2) polynomial product of ``u`` and ``v``."""
    if u.length != v.length:
        raise ValueError("length mismatch")
    if N is None:
        N = u.length
    if N != u.length:
        raise ValueError("truncation length must equal the operand length")
    return BitVector(N, clmul(u.bits, v.bits, N))


def basis_expansion(n: int, i: int) -> list[int]:
    """Row indices whose kernel rows sum to the unit vector ``e_i``."""
    return support(kernel_row_bits(n, i))


def lemma1_row_sum(n: int, i: int, j: int) -> BitVector:
    """Sum of ``g_{i+k-1}`` over ``k`` in ``supp(g_j)`` with ``k <= N + 1 - i``."""
    N = 1 << n
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexError(f"indices ({i}, {j}) outside [1, {N}]")
    acc = 0
    for k in support(kernel_row_bits(n, j)):
        if k <= N + 1 - i:
            acc ^= kernel_row_bits(n, i + k - 1)
    return BitVector(N, acc)


def shift_matrix(g: BitVector) -> UnitUpperTriangularMatrix:
    """Truncated Toeplitz matrix whose j-th row is ``g`` shifted right by ``j - 1``."""
    if not g.bits & 1:
        raise ValueError("generator must start with 1 to give a unit diagonal")
    N = g.length
    mask = (1 << N) - 1
    return UnitUpperTriangularMatrix(N, tuple((g.bits << k) & mask for k in range(N)))


def mat_mul(A: UnitUpperTriangularMatrix, B: UnitUpperTriangularMatrix) -> UnitUpperTriangularMatrix:
    if A.size != B.size:
        raise ValueError(f"size mismatch: {A.size} vs {B.size}")
    out = []
    for row in A.rows:
        acc = 0
        while row:
            low = row & -row
            acc ^= B.rows[low.bit_length() - 1]
            row ^= low
        out.append(acc)
    return UnitUpperTriangularMatrix(A.size, tuple(out))


@lru_cache(maxsize=None)
def _butterfly_masks(n: int) -> tuple[int, ...]:
    # level s: positions p (0-based) whose bit s is clear
    N = 1 << n
    masks = []
    for s in range(n):
        m = 0
        for p in range(N):
            if not (p >> s) & 1:
                m |= 1 << p
        masks.append(m)
    return tuple(masks)


def polar_transform(v: int, n: int) -> int:
    """Packed ``v @ K_2^{(x)n}``: coordinate j collects v over all supersets of j."""
    for s, mask in enumerate(_butterfly_masks(n)):
        v ^= (v >> (1 << s)) & mask
    return v


def _row_times_matrix(u: int, rows: Sequence[int]) -> int:
    acc = 0
    while u:
        low = u & -u
        acc ^= rows[low.bit_length() - 1]
        u ^= low
    return acc


def encode(u: BitVector, T: UnitUpperTriangularMatrix, n: int) -> tuple[BitVector, BitVector]:
    """Return ``(v, x)`` with ``v = u T`` and ``x = v K_2^{(x)n}``."""
    N = 1 << n
    if u.length != N or T.size != N:
        raise ValueError(f"size mismatch: u has {u.length}, T has {T.size}, 2^n = {N}")
    v = _row_times_matrix(u.bits, T.rows)
    return BitVector(N, v), BitVector(N, polar_transform(v, n))
