"""Brute-force ground truth: enumerate every message and tally codeword weights."""

from __future__ import annotations

from dataclasses import dataclass

from .code import CodeSpec
from .engine import PolarCosetSpec, WeightDistribution
from .gf2 import BitVector, encode, identity_matrix

__all__ = ["OracleLimits", "OracleLimitError", "brute_force_wd", "brute_force_coset_wd"]


class OracleLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleLimits:
    max_k: int = 24
    max_n: int = 10


def brute_force_wd(code: CodeSpec, limits: OracleLimits = OracleLimits()) -> WeightDistribution:
    if code.K > limits.max_k:
        raise OracleLimitError(f"K={code.K} exceeds oracle limit max_k={limits.max_k}")
    if code.n > limits.max_n:
        raise OracleLimitError(f"n={code.n} exceeds oracle limit max_n={limits.max_n}")
    N = code.N
    info = sorted(code.info_set)
    counts = [0] * (N + 1)
    for message in range(1 << len(info)):
        u = [0] * N
        for t, i in enumerate(info):
            u[i - 1] = (message >> t) & 1
        _, x = encode(BitVector.from_list(u), code.T, code.n)
        counts[x.weight] += 1
    return WeightDistribution(tuple(counts))


def brute_force_coset_wd(spec: PolarCosetSpec, limits: OracleLimits = OracleLimits()) -> WeightDistribution:
    N = spec.N
    free = [i for i in range(1, N + 1) if not (spec.frozen_mask >> (i - 1)) & 1]
    if len(free) > limits.max_k:
        raise OracleLimitError(f"{len(free)} free bits exceed oracle limit max_k={limits.max_k}")
    T = identity_matrix(N)
    base = [(spec.frozen_values >> k) & 1 for k in range(N)]
    counts = [0] * (N + 1)
    for message in range(1 << len(free)):
        v = list(base)
        for t, i in enumerate(free):
            v[i - 1] = (message >> t) & 1
        _, x = encode(BitVector.from_list(v), T, spec.n)
        counts[x.weight] += 1
    return WeightDistribution(tuple(counts))
