import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectormix import (
    DomainError,
    GridPermutation,
    apply_permutation,
    identity_permutation,
    invert,
    partition,
    random_shuffle,
)


def rand_image(rng, side=32):
    return rng.integers(0, 256, size=(side, side, 3), dtype=np.uint8)


class TestPartition:
    def test_counts_and_sizes(self):
        img = np.zeros((256, 256, 3), dtype=np.uint8)
        patches = partition(img, 4)
        assert len(patches) == 16
        assert all(p.shape == (64, 64, 3) for p in patches)

    def test_g1_returns_whole_image(self):
        rng = np.random.default_rng(0)
        img = rand_image(rng)
        patches = partition(img, 1)
        assert len(patches) == 1
        assert np.array_equal(patches[0], img)

    def test_non_divisible_rejected(self):
        with pytest.raises(DomainError):
            partition(np.zeros((250, 250, 3), dtype=np.uint8), 4)

    def test_row_major_order(self):
        img = np.arange(16, dtype=np.uint8).reshape(4, 4)
        patches = partition(img, 2)
        assert np.array_equal(patches[0], [[0, 1], [4, 5]])
        assert np.array_equal(patches[1], [[2, 3], [6, 7]])
        assert np.array_equal(patches[2], [[8, 9], [12, 13]])


class TestApply:
    def test_identity_is_noop(self):
        rng = np.random.default_rng(1)
        img = rand_image(rng)
        assert np.array_equal(apply_permutation(img, identity_permutation(4)), img)

    def test_named_swap(self):
        img = np.arange(16, dtype=np.uint8).reshape(4, 4)
        perm = GridPermutation(2, np.array([3, 1, 2, 0]))
        out = apply_permutation(img, perm)
        patches_in = partition(img, 2)
        patches_out = partition(out, 2)
        assert np.array_equal(patches_out[3], patches_in[0])
        assert np.array_equal(patches_out[0], patches_in[3])
        assert np.array_equal(patches_out[1], patches_in[1])

    def test_roundtrip_100_random(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            g = int(rng.choice([2, 4, 8]))
            img = rand_image(rng)
            perm = GridPermutation(g, rng.permutation(g * g))
            there = apply_permutation(img, perm)
            back = apply_permutation(there, invert(perm))
            assert np.array_equal(back, img)

    def test_histogram_preserved(self):
        rng = np.random.default_rng(3)
        img = rand_image(rng)
        shuffled, _ = random_shuffle(rng, img, (4,))
        assert np.array_equal(
            np.bincount(img.ravel(), minlength=256),
            np.bincount(shuffled.ravel(), minlength=256),
        )

    def test_commutes_with_pixelwise_map(self):
        rng = np.random.default_rng(4)
        img = rand_image(rng)
        perm = GridPermutation(4, rng.permutation(16))
        inverted = 255 - img
        assert np.array_equal(apply_permutation(inverted, perm), 255 - apply_permutation(img, perm))


class TestInvert:
    def test_identity_self_inverse(self):
        perm = identity_permutation(3)
        assert np.array_equal(invert(perm).mapping, perm.mapping)

    def test_transposition_self_inverse(self):
        perm = GridPermutation(None, np.array([1, 0]))
        assert np.array_equal(invert(perm).mapping, [1, 0])

    @given(st.integers(2, 20))
    @settings(max_examples=40, deadline=None)
    def test_double_invert_is_identity_map(self, n):
        rng = np.random.default_rng(n)
        perm = GridPermutation(None, rng.permutation(n))
        assert np.array_equal(invert(invert(perm)).mapping, perm.mapping)


class TestRandomShuffle:
    def test_g1_identity(self):
        rng = np.random.default_rng(5)
        img = rand_image(rng)
        out, perm = random_shuffle(rng, img, (1,))
        assert np.array_equal(out, img)
        assert perm.g == 1

    def test_fixed_seed_reproducible(self):
        img = rand_image(np.random.default_rng(6))
        out1, p1 = random_shuffle(np.random.default_rng(99), img, (2, 4, 8))
        out2, p2 = random_shuffle(np.random.default_rng(99), img, (2, 4, 8))
        assert np.array_equal(out1, out2)
        assert p1.g == p2.g
        assert np.array_equal(p1.mapping, p2.mapping)

    def test_uniform_over_permutations_at_g2(self):
        rng = np.random.default_rng(7)
        img = rand_image(rng, side=8)
        counts = {}
        draws = 10_000
        for _ in range(draws):
            _, perm = random_shuffle(rng, img, (2,))
            key = tuple(perm.mapping)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 24
        for count in counts.values():
            assert abs(count / draws - 1 / 24) <= 0.01

    def test_divisibility_enforced(self):
        rng = np.random.default_rng(8)
        with pytest.raises(DomainError):
            random_shuffle(rng, np.zeros((30, 30, 3), dtype=np.uint8), (4,))


class TestGridPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(DomainError):
            GridPermutation(2, np.array([0, 0, 1, 2]))

    def test_rejects_bad_granularity(self):
        with pytest.raises(DomainError):
            GridPermutation(3, np.arange(4))

    def test_applying_gridless_permutation_rejected(self):
        perm = GridPermutation(None, np.array([2, 1, 0]))
        with pytest.raises(DomainError):
            apply_permutation(np.zeros((6, 6, 3), dtype=np.uint8), perm)
