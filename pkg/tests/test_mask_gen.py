import math

import numpy as np
import pytest
from scipy import stats

from atmask.schemas import (
    MaskConfig,
    PatchScores,
    RemainderPool,
    ThresholdMode,
    VariationMap,
    Volume3D,
)
from atmask.services.mask_gen import (
    apply_mask,
    expand_mask,
    generate_mask,
    mask_counts,
    mask_coverage_stats,
    patch_scores,
    pool_mask,
    random_mask,
    score_patches,
)
from atmask.utils.exceptions import DimensionMismatchError, PatchGridError
from tests.oracles import patch_means


def make_scores(values, grid_dims, tau=0.5, patch_size=4):
    values = np.asarray(values, dtype=np.float64)
    return PatchScores(
        grid_dims=grid_dims,
        patch_size=patch_size,
        scores=values,
        tau=tau,
        n_high=int(np.count_nonzero(values > tau)),
    )


def two_level_scores(n_high, grid_dims=(8, 8, 8), seed=0):
    n = int(np.prod(grid_dims))
    values = np.full(n, 0.1)
    values[np.random.default_rng(seed).permutation(n)[:n_high]] = 0.9
    return make_scores(values, grid_dims)


# ============================================
# PATCH SCORES
# ============================================

class TestPatchScores:
    def test_zero_map(self):
        scores = patch_scores(VariationMap(data=np.zeros((8, 8, 8))), 4)
        assert scores.grid_dims == (2, 2, 2)
        assert not scores.scores.any()
        assert scores.n_high == 0

    def test_indicator_patch(self):
        data = np.zeros((4, 4, 4))
        data[2:4, 0:2, 2:4] = 1.0
        scores = patch_scores(VariationMap(data=data), 2)
        assert scores.scores.tolist() == [0, 0, 0, 0, 0, 1, 0, 0]
        assert scores.n_high == 1

    def test_matches_per_patch_average(self, rng):
        data = rng.random((8, 12, 4)).astype(np.float32)
        scores = patch_scores(VariationMap(data=data), 4)
        np.testing.assert_allclose(scores.scores, patch_means(data.astype(np.float64), 4), rtol=1e-12)

    def test_indivisible_axis(self):
        with pytest.raises(PatchGridError) as info:
            patch_scores(VariationMap(data=np.zeros((4, 6, 4))), 4)
        assert info.value.axis == 1

    def test_quantile_threshold(self):
        data = np.linspace(0.0, 1.0, 64).reshape(4, 4, 4)
        cfg = MaskConfig(patch_size=1, threshold_tau=0.75, threshold_mode=ThresholdMode.QUANTILE)
        scores = score_patches(VariationMap(data=data), cfg)
        assert scores.n_high == 16
        assert 0.7 < scores.tau < 0.8


# ============================================
# MASK GENERATION
# ============================================

class TestGenerateMask:
    def test_ratio_zero_masks_nothing(self):
        pm = generate_mask(two_level_scores(200), MaskConfig(mask_ratio_r=0.0))
        assert pm.m == pm.m_h == pm.m_r == 0
        assert not pm.bits.any()

    def test_counts_when_high_set_is_short(self):
        pm = generate_mask(two_level_scores(200), MaskConfig(mask_ratio_r=0.75, high_var_fraction_beta=0.65))
        assert (pm.m, pm.m_h, pm.m_r) == (384, 200, 184)
        assert int(pm.bits.sum()) == 384

    def test_counts_when_high_set_is_plentiful(self):
        scores = two_level_scores(400)
        pm = generate_mask(scores, MaskConfig(mask_ratio_r=0.65, high_var_fraction_beta=1.0))
        assert (pm.m, pm.m_h, pm.m_r) == (332, 332, 0)
        assert (scores.scores[pm.bits] > 0.5).all()

    def test_all_high_patches_masked_when_budget_allows(self):
        scores = two_level_scores(200)
        pm = generate_mask(scores, MaskConfig(mask_ratio_r=0.75, high_var_fraction_beta=0.65, seed=9))
        assert pm.bits[scores.high_mask()].all()

    def test_counts_on_random_instances(self, rng):
        for _ in range(1000):
            grid = tuple(int(g) for g in rng.integers(1, 6, size=3))
            n = int(np.prod(grid))
            tau = float(rng.random())
            scores = make_scores(rng.random(n), grid, tau=tau)
            ratio, beta = float(rng.random()), float(rng.random())
            pool = RemainderPool.ALL_REMAINING if rng.random() < 0.5 else RemainderPool.LOW_VARIATION_FIRST
            cfg = MaskConfig(
                patch_size=4, mask_ratio_r=ratio, high_var_fraction_beta=beta, threshold_tau=tau,
                remainder_pool=pool, seed=int(rng.integers(0, 2 ** 32)),
            )
            pm = generate_mask(scores, cfg)

            m = math.floor(ratio * n)
            m_h = min(math.floor(beta * m), scores.n_high)
            assert int(pm.bits.sum()) == pm.m == m
            assert pm.m_h == m_h and pm.m_r == m - m_h

            masked_high = int(np.count_nonzero(pm.bits & scores.high_mask()))
            if pool == RemainderPool.LOW_VARIATION_FIRST:
                overflow = max(0, pm.m_r - (n - scores.n_high))
                assert masked_high == m_h + overflow
            else:
                assert masked_high >= m_h

    def test_same_seed_same_mask(self):
        scores = two_level_scores(100)
        cfg = MaskConfig(seed=1234)
        assert np.array_equal(generate_mask(scores, cfg).bits, generate_mask(scores, cfg).bits)

    def test_different_seeds_differ(self, rng):
        scores = make_scores(rng.random(64), (4, 4, 4))
        masks = {generate_mask(scores, MaskConfig(seed=s)).bits.tobytes() for s in range(100)}
        assert len(masks) == 100

    def test_mask_counts_helper(self):
        assert mask_counts(512, 200, 0.75, 0.65) == (384, 200, 184)
        assert mask_counts(10, 0, 1.0, 1.0) == (10, 0, 10)

    def test_beta_biases_toward_texture(self, rng):
        scores = make_scores(rng.random(512), (8, 8, 8))

        def mean_masked(beta):
            values = [
                mask_coverage_stats(
                    generate_mask(scores, MaskConfig(high_var_fraction_beta=beta, seed=s)), scores
                ).mean_score_masked
                for s in range(100)
            ]
            return float(np.mean(values))

        assert mean_masked(0.65) > mean_masked(0.0)

    def test_low_variation_first_fills_low_pool(self):
        scores = two_level_scores(100)
        cfg = MaskConfig(mask_ratio_r=0.5, high_var_fraction_beta=0.2, remainder_pool=RemainderPool.LOW_VARIATION_FIRST)
        pm = generate_mask(scores, cfg)
        report = mask_coverage_stats(pm, scores)
        assert report.masked_high == pm.m_h == math.floor(0.2 * 256)

    @pytest.mark.parametrize("n_high, ratio, beta", [
        (300, 0.5, 0.3),
        (200, 0.75, 0.65),
        (100, 0.6, 0.1),
        (400, 0.2, 0.9),
        (50, 0.75, 0.65),
    ])
    def test_masked_high_equals_m_h_with_low_variation_first(self, n_high, ratio, beta):
        scores = two_level_scores(n_high)
        for seed in range(20):
            cfg = MaskConfig(mask_ratio_r=ratio, high_var_fraction_beta=beta,
                             remainder_pool=RemainderPool.LOW_VARIATION_FIRST, seed=seed)
            pm = generate_mask(scores, cfg)
            assert pm.m_r <= 512 - n_high
            assert mask_coverage_stats(pm, scores).masked_high == pm.m_h

    def test_default_pool_can_exceed_m_h(self):
        scores = two_level_scores(300)
        cfg = MaskConfig(mask_ratio_r=0.75, high_var_fraction_beta=0.3, seed=0)
        pm = generate_mask(scores, cfg)
        assert (pm.m, pm.m_h, pm.m_r) == (384, 115, 269)
        assert mask_coverage_stats(pm, scores).masked_high >= pm.m_h

        low_first = generate_mask(scores, cfg.model_copy(update={"remainder_pool": RemainderPool.LOW_VARIATION_FIRST}))
        assert mask_coverage_stats(low_first, scores).masked_high == 115 + (269 - 212)


@pytest.mark.slow
class TestUniformity:
    def test_beta_zero_is_uniform_over_patches(self):
        scores = make_scores(np.random.default_rng(5).random(64), (4, 4, 4))
        counts = np.zeros(64)
        for seed in range(1000):
            pm = generate_mask(scores, MaskConfig(mask_ratio_r=0.5, high_var_fraction_beta=0.0, seed=seed))
            counts += pm.bits
        assert stats.chisquare(counts).pvalue > 0.01

    def test_beta_zero_hits_high_patches_hypergeometrically(self):
        values = np.full(64, 0.1)
        values[:20] = 0.9
        scores = make_scores(values, (4, 4, 4))
        fractions = []
        for seed in range(1000):
            pm = generate_mask(scores, MaskConfig(mask_ratio_r=0.75, high_var_fraction_beta=0.0, seed=seed))
            fractions.append(mask_coverage_stats(pm, scores).masked_high_fraction)

        m = 48
        expected = 20 / 64
        se = stats.hypergeom(M=64, n=20, N=m).std() / m / math.sqrt(len(fractions))
        assert abs(np.mean(fractions) - expected) <= 3 * se


class TestRandomMask:
    def test_count_and_determinism(self):
        a = random_mask((4, 4, 4), 0.6, seed=3)
        b = random_mask((4, 4, 4), 0.6, seed=3)
        assert a.m == int(a.bits.sum()) == 38
        assert np.array_equal(a.bits, b.bits)

    def test_reports_high_overlap(self):
        scores = two_level_scores(40, grid_dims=(4, 4, 4))
        pm = random_mask((4, 4, 4), 0.5, seed=1, scores=scores)
        assert pm.n_high == 40
        assert pm.m_h == int(np.count_nonzero(pm.bits & scores.high_mask()))


# ============================================
# EXPANSION AND APPLICATION
# ============================================

class TestExpandAndApply:
    def test_empty_mask_expands_to_zeros(self):
        pm = generate_mask(two_level_scores(0, grid_dims=(2, 2, 2)), MaskConfig(mask_ratio_r=0.0))
        assert not expand_mask(pm, 16).data.any()

    def test_single_patch(self):
        values = np.zeros(8)
        values[5] = 1.0
        scores = make_scores(values, (2, 2, 2))
        pm = generate_mask(scores, MaskConfig(mask_ratio_r=0.125, high_var_fraction_beta=1.0))
        voxels = expand_mask(pm, 16)
        assert voxels.dims == (32, 32, 32)
        assert int(voxels.data.sum()) == 4096
        assert voxels.data[16:32, 0:16, 16:32].all()

    def test_pool_inverts_expand(self, rng):
        scores = make_scores(rng.random(27), (3, 3, 3))
        pm = generate_mask(scores, MaskConfig(seed=4))
        voxels = expand_mask(pm, 4, spacing=(0.5, 0.5, 0.5))
        assert voxels.spacing == (0.5, 0.5, 0.5)
        assert np.array_equal(pool_mask(voxels, 4), pm.bits)
        assert voxels.data.mean() == pytest.approx(pm.m / pm.n_patches)

    def test_zero_mask_is_identity(self, random_volume):
        v = random_volume((8, 8, 8))
        out = apply_mask(v, Volume3D(data=np.zeros((8, 8, 8))))
        assert np.array_equal(out.data, v.data)

    def test_full_mask_zeroes_everything(self, random_volume):
        v = random_volume((8, 8, 8))
        assert not apply_mask(v, Volume3D(data=np.ones((8, 8, 8)))).data.any()

    def test_masked_fraction_on_constant_volume(self):
        scores = make_scores(np.linspace(0, 1, 64), (4, 4, 4))
        pm = generate_mask(scores, MaskConfig(seed=2))
        out = apply_mask(Volume3D(data=np.ones((16, 16, 16))), expand_mask(pm, 4))
        assert out.data.mean() == pytest.approx(1.0 - pm.m / 64)

    def test_dims_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            apply_mask(Volume3D(data=np.ones((4, 4, 4))), Volume3D(data=np.ones((4, 4, 8))))


class TestCoverage:
    def test_full_high_allocation(self):
        scores = two_level_scores(400)
        pm = generate_mask(scores, MaskConfig(mask_ratio_r=0.5, high_var_fraction_beta=1.0))
        assert mask_coverage_stats(pm, scores).masked_high_fraction == 1.0

    def test_full_ratio_covers_every_high_patch(self):
        scores = two_level_scores(50)
        pm = generate_mask(scores, MaskConfig(mask_ratio_r=1.0, high_var_fraction_beta=0.3))
        report = mask_coverage_stats(pm, scores)
        assert report.high_coverage == 1.0
        assert report.mean_score_unmasked is None

    def test_empty_mask(self):
        scores = two_level_scores(50)
        report = mask_coverage_stats(generate_mask(scores, MaskConfig(mask_ratio_r=0.0)), scores)
        assert report.m == 0
        assert report.mean_score_masked is None
        assert report.masked_high_fraction == 0.0

    def test_grid_mismatch(self):
        pm = random_mask((2, 2, 2), 0.5, seed=0)
        with pytest.raises(DimensionMismatchError):
            mask_coverage_stats(pm, two_level_scores(3, grid_dims=(4, 4, 4)))
