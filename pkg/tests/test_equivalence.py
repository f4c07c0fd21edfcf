import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import RECIPE_KINDS, dense_kernel, dense_matrix, random_code
from pcdwd.code import DEFAULT_PAC_MEMORY, PAC, Identity, make_code
from pcdwd.engine import compute_wd
from pcdwd.equivalence import (
    class_info_rows,
    class_member,
    equivalence_class,
    monte_carlo_reduction,
    optimize_pretransform,
    recover_memory,
)
from pcdwd.expansion import expanded_information_set, pack_rows
from pcdwd.gf2 import BitVector, UnitUpperTriangularMatrix, identity_matrix, shift_matrix

V = BitVector.from_list
S = BitVector.from_string


def pac_code(memory: str, n: int, K: int):
    return make_code(n, PAC(S(memory)), K=K)


class TestClassMembers:
    def test_first_member_is_original(self):
        code = pac_code("1011", 4, 8)
        assert class_member(code, 1).T == code.T

    def test_class_size(self):
        code = pac_code("11", 3, 4)
        assert len(list(equivalence_class(code))) == 8

    def test_memory_product_example(self):
        code = pac_code("11111", 4, 8)
        assert recover_memory(class_member(code, 2).T) == S("100001")

    def test_default_memory_third_member(self):
        code = pac_code(DEFAULT_PAC_MEMORY, 5, 16)
        assert recover_memory(class_member(code, 3).T) == S("1000000111")

    @pytest.mark.parametrize("N", [2, 4, 8, 16, 32])
    def test_rows_shift_cyclically(self, N):
        n = N.bit_length() - 1
        rng = np.random.default_rng(N)
        Td = np.triu(rng.random((N, N)) < 0.5, 1).astype(np.int64) + np.eye(N, dtype=np.int64)
        code = make_code(n, K=N).with_T(UnitUpperTriangularMatrix.from_rows(Td.tolist()))
        G = dense_kernel(n).astype(np.int64)
        base = (Td @ G) % 2
        for j in range(1, N + 1):
            rows = (dense_matrix(class_member(code, j).T).astype(np.int64) @ G) % 2
            assert np.array_equal(rows, np.roll(base, j - 1, axis=1))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2**30), st.sampled_from(RECIPE_KINDS))
    def test_spectrum_invariant(self, n, seed, kind):
        rng = random.Random(seed)
        code = random_code(rng, n, rng.randint(0, min(10, 1 << n)), kind)
        base = compute_wd(code)
        for member in equivalence_class(code):
            assert compute_wd(member) == base

    def test_class_closure(self):
        rng = random.Random(5)
        code = random_code(rng, 3, 4, "random")
        base = compute_wd(code)
        for j in range(1, 9):
            for k in range(1, 9):
                assert compute_wd(class_member(class_member(code, j), k)) == base


class TestRecoverMemory:
    def test_identity(self):
        assert recover_memory(identity_matrix(8)) == V([1])

    def test_round_trip(self):
        T = make_code(4, PAC(V([1, 1, 0, 1])), K=8).T
        assert recover_memory(T) == V([1, 1, 0, 1])

    def test_non_toeplitz(self):
        T = make_code(3, PAC(V([1, 1, 0, 1])), K=4).T
        rows = list(T.rows)
        rows[2] ^= 1 << 7
        assert recover_memory(UnitUpperTriangularMatrix(8, tuple(rows))) is None


class TestOptimizer:
    def test_identity_code(self):
        rep = optimize_pretransform(make_code(5, K=16))
        assert len(rep.candidates) == 32
        assert rep.lam_star <= rep.lam_original

    @pytest.mark.parametrize("K,n2,n3", [(25, 13, 11), (64, 34, 30), (115, 53, 49)])
    def test_reference_pac_rows(self, K, n2, n3):
        rep = optimize_pretransform(pac_code(DEFAULT_PAC_MEMORY, 7, K))
        assert (rep.lam_original, rep.lam_star) == (n2, n3)
        assert rep.memory_star == S("1000000111")

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**30), st.sampled_from(RECIPE_KINDS))
    def test_batch_candidates_match_reference(self, n, seed, kind):
        rng = random.Random(seed)
        code = random_code(rng, n, rng.randint(0, 1 << n), kind)
        rep = optimize_pretransform(code, with_memory=False)
        lams = [expanded_information_set(class_member(code, j)).lam for j in range(1, code.N + 1)]
        assert [c.lam for c in rep.candidates] == lams
        assert rep.j_star == lams.index(min(lams)) + 1

    def test_class_rows_match_matrix_product(self):
        rng = random.Random(9)
        for n in (3, 6, 7):
            code = random_code(rng, n, 1 << (n - 1), "random")
            N = code.N
            rows = pack_rows(list(code.T.rows), N)
            cand = class_info_rows(rows, N)
            for j in (1, 2, 3, N // 2 + 1, N):
                want = pack_rows(list(class_member(code, j).T.rows), N)
                assert np.array_equal(cand[j - 1], want)

    def test_report_dict(self):
        d = optimize_pretransform(pac_code(DEFAULT_PAC_MEMORY, 7, 64)).as_dict()
        assert d == {"n1": 34, "n2": 34, "n3": 30, "j_star": 3, "tie_break": "smallest-j", "memory_star": "1000000111"}


class TestMonteCarlo:
    def test_single_sample(self):
        (row,) = monte_carlo_reduction(32, [16], 1, seed=3)
        assert row.r1 in (0.0, 1.0) and row.r2 in (0.0, 1.0)

    def test_identity_ensemble(self):
        # density 0 gives T = I for every sample
        rows = monte_carlo_reduction(64, [20, 32], 5, density=0.0)
        for row in rows:
            assert row.r2 >= row.r1
            assert row.r1 in (0.0, 1.0)
            code = make_code(6, Identity(), K=row.K)
            assert row.mean_n2 == expanded_information_set(code).lam
            assert row.mean_n3 == optimize_pretransform(code).lam_star

    def test_deterministic_and_chunk_independent(self):
        a = monte_carlo_reduction(64, [25], 30, seed=4)
        b = monte_carlo_reduction(64, [25], 30, seed=4, chunk=7)
        assert a == b

    def test_samples_match_random_recipe(self):
        from pcdwd.code import RandomUpper

        (row,) = monte_carlo_reduction(32, [12], 6, seed=8)
        own = []
        for s in range(6):
            code = make_code(5, RandomUpper(0.5, (8, 12, s)), K=12)
            own.append(expanded_information_set(code).lam)
        assert row.mean_n2 == sum(own) / 6

    def test_r2_dominates(self):
        for row in monte_carlo_reduction(128, [38, 64], 300, seed=2):
            assert row.r2 >= row.r1

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            monte_carlo_reduction(32, [8], 0)
