"""
Executable kernel identities.

Each check returns an :class:`IdentityResult` listing how many instances were
verified and the first few counterexamples.  Exhaustive up to ``n = 6``
(``N = 8`` for the matrix product law), randomly sampled above.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import gf2
from .gf2 import BitVector, clmul, cyclic_shift, kernel_matrix_explicit, shift_matrix, support

__all__ = ["IdentityResult", "run_identities", "EXHAUSTIVE_MAX_N"]

EXHAUSTIVE_MAX_N = 6
PRODUCT_LAW_EXHAUSTIVE_N = 3
RANDOM_SAMPLES = 10_000

RowFn = Callable[[int, int], int]


@dataclass
class IdentityResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    notes: str = ""

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, message: str) -> None:
        self.failures.append(message)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f" ({self.notes})" if self.notes else ""
        line = f"{status} {self.name}: {self.checked} instances{extra}"
        for msg in self.failures[:5]:
            line += f"\n    counterexample: {msg}"
        return line


def _pairs(n: int, rng: random.Random, samples: int, constraint=None):
    N = 1 << n
    if n <= EXHAUSTIVE_MAX_N:
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                if constraint is None or constraint(i, j, N):
                    yield i, j
        return
    produced = 0
    while produced < samples:
        i, j = rng.randint(1, N), rng.randint(1, N)
        if constraint is None or constraint(i, j, N):
            produced += 1
            yield i, j


def check_closed_form(max_n: int, row: RowFn) -> IdentityResult:
    res = IdentityResult("closed-form kernel rows match the Kronecker construction")
    for n in range(0, max_n + 1):
        explicit = kernel_matrix_explicit(n)
        for i in range(1, (1 << n) + 1):
            res.checked += 1
            if row(n, i) != explicit[i - 1]:
                res.fail(f"n={n} i={i}: closed form {row(n, i):b} != explicit {explicit[i - 1]:b}")
    return res


def check_self_inverse(max_n: int) -> IdentityResult:
    res = IdentityResult("kernel power is its own inverse")
    for n in range(0, max_n + 1):
        rows = kernel_matrix_explicit(n)
        for i, r in enumerate(rows, start=1):
            acc = 0
            for k in support(r):
                acc ^= rows[k - 1]
            res.checked += 1
            if acc != 1 << (i - 1):
                res.fail(f"n={n}: row {i} of G*G is {acc:b}, not e_{i}")
    return res


def check_basis_expansion(max_n: int, row: RowFn) -> IdentityResult:
    res = IdentityResult("unit vectors as sums of kernel rows over supp(g_i)")
    for n in range(0, max_n + 1):
        for i in range(1, (1 << n) + 1):
            acc = 0
            for j in support(row(n, i)):
                acc ^= row(n, j)
            res.checked += 1
            if acc != 1 << (i - 1):
                res.fail(f"n={n} i={i}: sum is {acc:b}, expected e_{i}")
    return res


def check_row_convolution(max_n: int, row: RowFn, rng: random.Random, samples: int) -> IdentityResult:
    res = IdentityResult("g_i * g_j truncated equals g_(i+j-1)")
    for n in range(0, max_n + 1):
        N = 1 << n
        for i, j in _pairs(n, rng, samples, lambda i, j, N: i + j - 1 <= N):
            res.checked += 1
            got = clmul(row(n, i), row(n, j), N)
            if got != row(n, i + j - 1):
                res.fail(f"n={n} i={i} j={j}: {got:b} != g_{i + j - 1}")
    return res


def _lemma_sum(n: int, i: int, j: int, row: RowFn) -> int:
    N = 1 << n
    acc = 0
    for k in support(row(n, j)):
        if k <= N + 1 - i:
            acc ^= row(n, i + k - 1)
    return acc


def check_cyclic_shift_lemma(max_n: int, row: RowFn, rng: random.Random, samples: int) -> IdentityResult:
    res = IdentityResult("row sums over supp(g_j) give cyclic shifts of g_i")
    case1 = case2 = 0
    for n in range(0, max_n + 1):
        N = 1 << n
        for i, j in _pairs(n, rng, samples):
            res.checked += 1
            if j <= N + 1 - i:
                case1 += 1
            else:
                case2 += 1
            got = _lemma_sum(n, i, j, row)
            want = cyclic_shift(BitVector(N, row(n, i)), j - 1).bits
            if got != want:
                res.fail(f"n={n} i={i} j={j}: sum {got:b} != shift {want:b}")
    res.notes = f"{case1} with j <= N+1-i, {case2} with j > N+1-i"
    if max_n >= 1 and (case1 == 0 or case2 == 0):
        res.fail("one of the two index cases was never exercised")
    return res


def check_example_instance(row: RowFn) -> IdentityResult:
    res = IdentityResult("worked instance n=4, i=7, j=6")
    res.checked = 1
    want = BitVector.from_list([0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0]).bits
    got = _lemma_sum(4, 7, 6, row)
    if got != want:
        res.fail(f"sum {got:b} != {want:b}")
    if support(row(4, 6)) != [1, 2, 5, 6]:
        res.fail(f"supp(g_6) = {support(row(4, 6))}")
    return res


def check_product_law(max_n: int, rng: random.Random) -> IdentityResult:
    res = IdentityResult("T(a) T(b) = T(a*b truncated)")
    for n in range(0, max_n + 1):
        N = 1 << n
        if n <= PRODUCT_LAW_EXHAUSTIVE_N:
            gens = [(a << 1) | 1 for a in range(1 << (N - 1))]
            pairs = [(a, b) for a in gens for b in gens]
        else:
            count = 64 if n <= EXHAUSTIVE_MAX_N else 8
            pairs = [(rng.getrandbits(N) | 1, rng.getrandbits(N) | 1) for _ in range(count)]
        for a, b in pairs:
            res.checked += 1
            lhs = gf2.mat_mul(shift_matrix(BitVector(N, a)), shift_matrix(BitVector(N, b)))
            rhs = shift_matrix(BitVector(N, clmul(a, b, N)))
            if lhs != rhs:
                res.fail(f"N={N} a={a:b} b={b:b}")
    return res


def run_identities(
    max_n: int = EXHAUSTIVE_MAX_N,
    seed: int = 0,
    samples: int = RANDOM_SAMPLES,
    row: RowFn | None = None,
) -> list[IdentityResult]:
    if not 0 <= max_n <= 10:
        raise ValueError("max_n must lie in [0, 10]")
    row = row or gf2.kernel_row_bits
    rng = random.Random(seed)
    results = [
        check_closed_form(max_n, row),
        check_self_inverse(max_n),
        check_basis_expansion(max_n, row),
        check_row_convolution(max_n, row, rng, samples),
        check_cyclic_shift_lemma(max_n, row, rng, samples),
        check_product_law(max_n, rng),
    ]
    if max_n >= 4:
        results.append(check_example_instance(row))
    return results
