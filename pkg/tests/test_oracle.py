import random

import pytest

from _oracles import RECIPE_KINDS, dense_wd, random_code
from pcdwd.code import PAC, make_code
from pcdwd.engine import PolarCosetSpec, compute_wd
from pcdwd.equivalence import class_member
from pcdwd.gf2 import BitVector
from pcdwd.oracle import OracleLimitError, OracleLimits, brute_force_coset_wd, brute_force_wd

V = BitVector.from_list


def test_full_space():
    assert brute_force_wd(make_code(1, K=2)).counts == (1, 2, 1)


def test_pac_pair():
    assert brute_force_wd(make_code(1, PAC(V([1, 1])), frozen=[1])).counts == (1, 0, 1)


def test_limits():
    with pytest.raises(OracleLimitError, match="max_k=24"):
        brute_force_wd(make_code(5, K=25))
    with pytest.raises(OracleLimitError, match="max_k=3"):
        brute_force_wd(make_code(3, K=4), OracleLimits(max_k=3))
    with pytest.raises(OracleLimitError):
        brute_force_coset_wd(PolarCosetSpec(5, 0), OracleLimits(max_k=8))


def test_all_fixed_coset():
    # v = (1,0,1,1) encodes to g1 ^ g3 ^ g4 = (1,1,0,1) only
    spec = PolarCosetSpec.from_bits(V([1, 1, 1, 1]), V([1, 0, 1, 1]))
    wd = brute_force_coset_wd(spec)
    assert wd.total == 1
    assert wd.nonzero() == [(3, 1)]


@pytest.mark.parametrize("seed", range(30))
def test_matches_dense_enumeration(seed):
    # the oracle itself is cross-checked against a numpy row-space enumeration
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    code = random_code(rng, n, rng.randint(0, min(10, 1 << n)), rng.choice(RECIPE_KINDS))
    wd = brute_force_wd(code)
    assert list(wd.counts) == dense_wd(code)
    assert wd.total == 2**code.K


@pytest.mark.parametrize("seed", range(6))
def test_random_n16_matches_engine(seed):
    rng = random.Random(100 + seed)
    code = random_code(rng, 4, 8, "random")
    assert brute_force_wd(code) == compute_wd(code)


@pytest.mark.parametrize("seed", range(6))
def test_invariant_under_class_transform(seed):
    rng = random.Random(200 + seed)
    code = random_code(rng, 3, rng.randint(1, 6), rng.choice(RECIPE_KINDS))
    base = brute_force_wd(code)
    for j in range(1, code.N + 1):
        assert brute_force_wd(class_member(code, j)) == base
