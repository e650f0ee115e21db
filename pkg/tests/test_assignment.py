import numpy as np
import pytest

from sectormix import (
    DomainError,
    as_score_matrix,
    assignment_score,
    brute_force_assign,
    hungarian_assign,
    matrix_from_permutation,
    permutation_from_matrix,
)
from sectormix.shuffle import GridPermutation


def mapping_of(m_hat):
    return list(permutation_from_matrix(m_hat).mapping)


class TestHungarian:
    def test_dominant_diagonal(self):
        m = np.array([[0.9, 0.1], [0.2, 0.8]])
        m_hat = hungarian_assign(m)
        assert mapping_of(m_hat) == [0, 1]
        assert assignment_score(m, m_hat) == pytest.approx(1.7)

    def test_dominant_antidiagonal(self):
        m = np.array([[0.1, 0.9], [0.8, 0.2]])
        m_hat = hungarian_assign(m)
        assert mapping_of(m_hat) == [1, 0]
        assert assignment_score(m, m_hat) == pytest.approx(1.7)

    def test_greedy_trap_3x3(self):
        raw = np.array([[0.9, 0.8, 0.1], [0.85, 0.1, 0.2], [0.1, 0.7, 0.3]])
        m = raw / raw.sum(axis=1, keepdims=True)
        m_hat = hungarian_assign(m)
        assert mapping_of(m_hat) == [1, 0, 2]
        # objective in pre-normalization entries; greedy would reach only 1.8
        assert assignment_score(raw, m_hat) == pytest.approx(1.95, abs=1e-9)

    def test_oracle_equivalence_sweep(self):
        rng = np.random.default_rng(0)
        for n in range(2, 9):
            for _ in range(200):
                m = rng.uniform(0, 1, size=(n, n))
                a = assignment_score(m, hungarian_assign(m))
                b = assignment_score(m, brute_force_assign(m))
                assert abs(a - b) <= 1e-9

    def test_output_is_permutation_matrix(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 12))
            m_hat = hungarian_assign(rng.uniform(0, 1, size=(n, n)))
            assert (m_hat.sum(axis=0) == 1).all()
            assert (m_hat.sum(axis=1) == 1).all()
            assert set(np.unique(m_hat)) <= {0, 1}

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        m = rng.uniform(0, 1, size=(6, 6))
        base = hungarian_assign(m)
        for c in (0.5, 2.0, 3.0, 1e6, 1e-6):
            assert np.array_equal(hungarian_assign(c * m), base)

    def test_determinism(self):
        rng = np.random.default_rng(3)
        m = rng.uniform(0, 1, size=(7, 7))
        assert np.array_equal(hungarian_assign(m), hungarian_assign(m.copy()))

    def test_uniform_ties_break_lexicographically(self):
        for n in (2, 3, 4, 5):
            m_hat = hungarian_assign(np.full((n, n), 1.0 / n))
            assert mapping_of(m_hat) == list(range(n))

    def test_tie_matrices_match_brute_force_mapping(self):
        cases = [
            np.array([[0.5, 0.5], [0.5, 0.5]]),
            np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 1.0]]),
            np.array([[0.25, 0.25, 0.25, 0.25]] * 4),
            np.array([[1.0, 1.0, 0.5], [1.0, 0.5, 1.0], [0.5, 1.0, 1.0]]),
        ]
        for m in cases:
            assert mapping_of(hungarian_assign(m)) == mapping_of(brute_force_assign(m))

    def test_rejects_nan_and_negative(self):
        with pytest.raises(DomainError):
            hungarian_assign(np.array([[np.nan, 0.1], [0.1, 0.9]]))
        with pytest.raises(DomainError):
            hungarian_assign(np.array([[-0.1, 0.1], [0.1, 0.9]]))

    def test_rejects_non_square(self):
        with pytest.raises(DomainError):
            hungarian_assign(np.ones((2, 3)))


class TestBruteForce:
    def test_permutation_matrix_is_its_own_optimum(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            perm = rng.permutation(n)
            pm = np.zeros((n, n))
            pm[np.arange(n), perm] = 1.0
            assert np.array_equal(brute_force_assign(pm), pm.astype(np.uint8))

    def test_refuses_large_n(self):
        with pytest.raises(DomainError):
            brute_force_assign(np.ones((10, 10)))

    def test_five_by_five_sweep_matches_hungarian(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            m = rng.uniform(0, 1, size=(5, 5))
            a = assignment_score(m, hungarian_assign(m))
            b = assignment_score(m, brute_force_assign(m))
            assert abs(a - b) <= 1e-9


class TestPermutationMatrixConversion:
    def test_identity(self):
        assert mapping_of(np.eye(4, dtype=int)) == [0, 1, 2, 3]

    def test_antidiagonal_3x3_has_gridless_mapping(self):
        m_hat = np.zeros((3, 3), dtype=int)
        m_hat[0, 2] = m_hat[1, 1] = m_hat[2, 0] = 1
        perm = permutation_from_matrix(m_hat)
        assert list(perm.mapping) == [2, 1, 0]
        assert perm.g is None  # 3 patches cannot form a square grid

    def test_round_trip(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            g = int(rng.choice([2, 3, 4]))
            perm = GridPermutation(g, rng.permutation(g * g))
            back = permutation_from_matrix(matrix_from_permutation(perm))
            assert back.g == g
            assert np.array_equal(back.mapping, perm.mapping)

    def test_rejects_invalid_matrices(self):
        with pytest.raises(DomainError):
            permutation_from_matrix(np.array([[1, 1], [0, 0]]))
        with pytest.raises(DomainError):
            permutation_from_matrix(np.array([[0.5, 0.5], [0.5, 0.5]]))


class TestScoreMatrixContract:
    def test_clamps_floor(self):
        m = as_score_matrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert m.min() == pytest.approx(1e-8)

    def test_rejects_bad_row_sums(self):
        with pytest.raises(DomainError):
            as_score_matrix(np.array([[0.9, 0.3], [0.5, 0.5]]))

    def test_accepts_softmax_rows(self):
        rng = np.random.default_rng(7)
        logits = rng.normal(size=(6, 6))
        e = np.exp(logits - logits.max(axis=1, keepdims=True))
        soft = e / e.sum(axis=1, keepdims=True)
        out = as_score_matrix(soft)
        assert out.shape == (6, 6)
