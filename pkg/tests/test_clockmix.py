import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectormix import (
    DomainError,
    FaceCenter,
    LabeledImage,
    MixRecipe,
    clockmix_n,
    clockmix_pair,
    mix_label_hard,
    mix_label_soft,
    sample_recipe,
)
from sectormix.clockmix import evenly_spaced_angles
from sectormix.geometry import default_center
from sectormix.pipeline import AugConfig


def flat(side, value, label=0):
    return LabeledImage(np.full((side, side, 3), value, dtype=np.uint8), label)


class TestPair:
    def test_quadrant_mean_with_constant_sources(self):
        out = clockmix_pair(flat(101, 10), flat(101, 20, 1), 90.0, 0.0, FaceCenter(50, 50))
        assert 12.3 <= out.pixels.mean() <= 12.7
        assert out.label == 1

    def test_identical_sources_unchanged(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
        for rho in (10.0, 180.0, 350.0):
            out = clockmix_pair(LabeledImage(img, 0), LabeledImage(img, 0), rho, 45.0)
            assert np.array_equal(out.pixels, img)

    def test_every_pixel_from_exactly_one_source(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a = flat(32, 10)
            b = flat(32, 200, 1)
            out = clockmix_pair(a, b, float(rng.uniform(1, 359)), float(rng.uniform(0, 360)))
            assert set(np.unique(out.pixels)) <= {10, 200}

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DomainError):
            clockmix_pair(flat(16, 0), flat(32, 0), 90.0, 0.0)


class TestNWay:
    def test_three_way_thirds(self):
        recipe = MixRecipe(("a", "b", "c"), (240.0, 120.0), 15.0, default_center(256, 256))
        images = [flat(256, v) for v in (10, 20, 30)]
        mixed = clockmix_n(images, recipe)
        for v in (10, 20, 30):
            frac = (mixed.pixels[..., 0] == v).mean()
            assert abs(frac - 1 / 3) <= 0.02

    def test_four_way_quarters(self):
        recipe = MixRecipe(tuple("abcd"), (270.0, 180.0, 90.0), 33.0, default_center(256, 256))
        images = [flat(256, v) for v in (10, 20, 30, 40)]
        mixed = clockmix_n(images, recipe)
        for v in (10, 20, 30, 40):
            frac = (mixed.pixels[..., 0] == v).mean()
            assert abs(frac - 0.25) <= 0.02

    def test_single_source_unchanged(self):
        rng = np.random.default_rng(2)
        img = rng.integers(0, 256, (24, 24, 3), dtype=np.uint8)
        recipe = MixRecipe(("solo",), (), 123.0, default_center(24, 24))
        out = clockmix_n([LabeledImage(img, 1)], recipe)
        assert np.array_equal(out.pixels, img)
        assert out.label == 1

    def test_every_source_retains_its_arc(self):
        # with a shared base, source k's region is the arc (rho_{k+1}, rho_k]
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(2, 5))
            angles = np.sort(rng.uniform(45, 315, n - 1))[::-1]
            if np.any(np.diff(angles[::-1]) < 20):
                continue
            recipe = MixRecipe(
                tuple(range(n)),
                tuple(float(a) for a in angles),
                float(rng.uniform(0, 360)),
                default_center(128, 128),
            )
            images = [flat(128, 10 * (k + 1)) for k in range(n)]
            mixed = clockmix_n(images, recipe)
            bounds = (360.0,) + recipe.sweep_angles + (0.0,)
            for k in range(n):
                expected = (bounds[k] - bounds[k + 1]) / 360.0
                frac = (mixed.pixels[..., 0] == 10 * (k + 1)).mean()
                assert frac > 0
                assert abs(frac - expected) < 0.03

    def test_label_commutes_with_mixing(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(2, 5))
            labels = [int(rng.integers(0, 2)) for _ in range(n)]
            recipe = MixRecipe(
                tuple(range(n)),
                evenly_spaced_angles(n),
                float(rng.uniform(0, 360)),
                default_center(32, 32),
            )
            images = [flat(32, 5 * (k + 1), labels[k]) for k in range(n)]
            assert clockmix_n(images, recipe).label == mix_label_hard(labels)

    def test_count_mismatch_rejected(self):
        recipe = MixRecipe(("a", "b"), (180.0,), 0.0, default_center(16, 16))
        with pytest.raises(DomainError):
            clockmix_n([flat(16, 1)], recipe)


class TestLabels:
    @pytest.mark.parametrize(
        "labels,expected",
        [((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 1), ((0, 1, 0), 1), ((0, 0, 0, 0), 0)],
    )
    def test_hard_label_examples(self, labels, expected):
        assert mix_label_hard(labels) == expected

    def test_hard_label_is_or_exhaustive(self):
        for n in range(1, 5):
            for bits in np.ndindex(*([2] * n)):
                assert mix_label_hard(bits) == int(any(bits))
                product = 1
                for y in bits:
                    product *= 1 - y
                assert mix_label_hard(bits) == 1 - product

    def test_hard_label_rejects_empty_and_invalid(self):
        with pytest.raises(DomainError):
            mix_label_hard([])
        with pytest.raises(DomainError):
            mix_label_hard([0, 2])

    @pytest.mark.parametrize("ya,yb,lam,expected", [(1, 0, 0.7, 0.7), (1, 0, 1.0, 1.0), (1, 1, 0.3, 1.0)])
    def test_soft_label_examples(self, ya, yb, lam, expected):
        assert mix_label_soft(ya, yb, lam) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(0, 1), st.sampled_from([0, 1]), st.sampled_from([0, 1]))
    @settings(max_examples=60, deadline=None)
    def test_soft_label_matches_interpolation(self, lam, ya, yb):
        assert mix_label_soft(ya, yb, lam) == pytest.approx(lam * ya + (1 - lam) * yb, abs=1e-12)

    def test_soft_label_rejects_bad_lambda(self):
        with pytest.raises(DomainError):
            mix_label_soft(1, 0, 1.5)


class TestRecipeSampling:
    def test_single_source_has_no_angles(self):
        rng = np.random.default_rng(0)
        recipe = sample_recipe(rng, 1, AugConfig())
        assert recipe.sweep_angles == ()
        assert recipe.n_sources == 1

    def test_fixed_seed_is_reproducible(self):
        cfg = AugConfig()
        r1 = sample_recipe(np.random.default_rng(42), 3, cfg)
        r2 = sample_recipe(np.random.default_rng(42), 3, cfg)
        assert r1 == r2

    def test_property_sweep_range_and_gaps(self):
        cfg = AugConfig()
        rng = np.random.default_rng(5)
        for _ in range(10_000):
            n = int(rng.integers(2, 5))
            recipe = sample_recipe(rng, n, cfg)
            angles = recipe.sweep_angles
            assert all(45 <= a <= 315 for a in angles)
            assert all(a > b for a, b in zip(angles, angles[1:]))
            assert all(a - b >= cfg.min_sector for a, b in zip(angles, angles[1:]))
            assert 0 <= recipe.rho_base < 360

    def test_fallback_when_gaps_unreachable(self):
        # min_sector so large that rejection always fails: evenly spaced fallback
        cfg = AugConfig(min_sector=179.0, sample_retry=5)
        recipe = sample_recipe(np.random.default_rng(0), 4, cfg)
        assert recipe.sweep_angles == evenly_spaced_angles(4)

    def test_invalid_count_rejected(self):
        with pytest.raises(DomainError):
            sample_recipe(np.random.default_rng(0), 5, AugConfig())


class TestRecipeValidation:
    def test_angle_descent_enforced(self):
        with pytest.raises(DomainError):
            MixRecipe(("a", "b", "c"), (120.0, 240.0), 0.0, default_center(8, 8))

    def test_source_count_capped_at_four(self):
        with pytest.raises(DomainError):
            MixRecipe(tuple("abcde"), (300.0, 250.0, 200.0, 150.0), 0.0, default_center(8, 8))

    def test_angle_count_enforced(self):
        with pytest.raises(DomainError):
            MixRecipe(("a", "b", "c"), (240.0,), 0.0, default_center(8, 8))

    def test_area_fractions_sum_to_one(self):
        recipe = MixRecipe(("a", "b", "c"), (250.0, 100.0), 0.0, default_center(8, 8))
        fractions = recipe.area_fractions()
        assert sum(fractions) == pytest.approx(1.0)
        assert fractions == ((360 - 250) / 360, (250 - 100) / 360, 100 / 360)
