"""
Otsu eşikleme, morfolojik düzeltme ve kesitler arası iyileştirme.
"""

import numpy as np
import pytest

from models.volume import Mask3D, ProbMap3D
from postproc.morphology import morph_smooth
from postproc.otsu import (
    Histogram256,
    binarize,
    binarize_channels,
    binarize_with_result,
    histogram_from_levels,
    otsu_threshold,
    prob_to_levels,
)
from postproc.temporal import temporal_refine
from tests.conftest import sphere_mask
from utils.exceptions import ConfigError, DegenerateHistogramError, GridMismatchError, ShapeMismatchError

SPACING = (1.0, 1.0, 1.0)


def brute_force_otsu(counts: np.ndarray) -> int:
    p = counts / counts.sum()
    k = np.arange(256)
    best, best_tau = -1.0, 0
    for tau in range(255):
        w0, w1 = p[: tau + 1].sum(), p[tau + 1:].sum()
        if w0 == 0 or w1 == 0:
            var = 0.0
        else:
            mu0 = (k[: tau + 1] * p[: tau + 1]).sum() / w0
            mu1 = (k[tau + 1:] * p[tau + 1:]).sum() / w1
            var = w0 * w1 * (mu0 - mu1) ** 2
        if var > best + 1e-15:
            best, best_tau = var, tau
    return best_tau


class TestHistogram:
    def test_length_checked(self):
        with pytest.raises(ShapeMismatchError):
            Histogram256(np.ones(10))

    def test_negative_counts(self):
        counts = np.zeros(256)
        counts[3] = -1
        with pytest.raises(DegenerateHistogramError):
            Histogram256(counts)

    def test_levels_round_half_up(self):
        assert prob_to_levels(np.array([0.0, 0.5, 1.0, 0.25])).tolist() == [0, 128, 255, 64]


class TestOtsu:
    def test_bimodal_threshold_between_modes(self):
        levels = np.concatenate([np.full(100, 40), np.full(100, 200)])
        result = otsu_threshold(histogram_from_levels(levels))
        assert 40 <= result.tau_star < 200
        # eşitlikte en küçük τ
        assert result.tau_star == 40

    def test_matches_brute_force(self, rng):
        levels = np.concatenate([rng.normal(60, 15, 500), rng.normal(180, 25, 300)])
        levels = np.clip(np.round(levels), 0, 255).astype(int)
        h = histogram_from_levels(levels)
        assert otsu_threshold(h).tau_star == brute_force_otsu(h.counts)

    def test_raw_and_normalized_agree(self, rng):
        h = histogram_from_levels(rng.integers(0, 256, 1000))
        assert otsu_threshold(h).tau_star == otsu_threshold(h.normalize()).tau_star

    def test_single_level_degenerate(self):
        with pytest.raises(DegenerateHistogramError):
            otsu_threshold(histogram_from_levels(np.full(50, 7)))

    def test_class_statistics(self):
        levels = np.concatenate([np.full(30, 10), np.full(70, 250)])
        result = otsu_threshold(histogram_from_levels(levels))
        assert result.omega0 == pytest.approx(0.3)
        assert result.omega1 == pytest.approx(0.7)
        assert result.mu0 == pytest.approx(10.0)
        assert result.mu1 == pytest.approx(250.0)


class TestBinarize:
    def test_otsu_recovers_clean_mask(self):
        mask = sphere_mask((16, 16, 16), (8, 8, 8), 4)
        p = ProbMap3D(mask.data.astype(float), SPACING)
        np.testing.assert_array_equal(binarize(p).data, mask.data)

    def test_fixed_mode_strict(self):
        p = ProbMap3D(np.full((2, 2, 2), 128 / 255), SPACING)
        assert binarize(p, "fixed", 128).count == 0
        assert binarize(p, "fixed", 127).count == 8

    def test_fixed_returns_no_otsu(self):
        p = ProbMap3D(np.full((2, 2, 2), 0.7), SPACING)
        _, result = binarize_with_result(p, "fixed", 100)
        assert result is None

    def test_invalid_tau(self):
        p = ProbMap3D(np.full((2, 2, 2), 0.7), SPACING)
        with pytest.raises(ConfigError):
            binarize(p, "fixed", 255)

    def test_unknown_mode(self):
        p = ProbMap3D(np.full((2, 2, 2), 0.7), SPACING)
        with pytest.raises(ConfigError):
            binarize(p, "median")

    def test_channels_independent(self):
        liver = sphere_mask((12, 12, 12), (6, 6, 6), 5)
        tumor = sphere_mask((12, 12, 12), (6, 6, 6), 2)
        masks = binarize_channels(
            ProbMap3D(liver.data * 0.8, SPACING), ProbMap3D(tumor.data * 0.6, SPACING)
        )
        np.testing.assert_array_equal(masks.liver.data, liver.data)
        np.testing.assert_array_equal(masks.tumor.data, tumor.data)

    def test_channels_grid_checked(self):
        a = ProbMap3D(np.zeros((4, 4, 4)), SPACING)
        b = ProbMap3D(np.zeros((4, 4, 5)), SPACING)
        with pytest.raises(GridMismatchError):
            binarize_channels(a, b, "fixed")


class TestMorphology:
    def test_removes_thin_structures(self):
        data = np.zeros((12, 12, 3), dtype=np.uint8)
        data[2:8, 2:8, 1] = 1  # 6x6 kare kalır
        data[10, 1:11, 1] = 1  # 1 voksel kalınlığında çizgi silinir
        out = morph_smooth(Mask3D(data, SPACING))
        expected = np.zeros_like(data)
        expected[2:8, 2:8, 1] = 1
        np.testing.assert_array_equal(out.data, expected)

    def test_slices_independent(self):
        data = np.zeros((8, 8, 3), dtype=np.uint8)
        data[2:6, 2:6, 1] = 1
        out = morph_smooth(Mask3D(data, SPACING))
        assert out.data[:, :, 0].sum() == 0 and out.data[:, :, 2].sum() == 0

    def test_idempotent(self):
        mask = sphere_mask((20, 20, 10), (10, 10, 5), 6)
        once = morph_smooth(mask)
        np.testing.assert_array_equal(morph_smooth(once).data, once.data)

    def test_anti_extensive(self):
        mask = sphere_mask((20, 20, 10), (10, 10, 5), 5)
        out = morph_smooth(mask)
        assert not (out.foreground & ~mask.foreground).any()


class TestTemporal:
    def make(self):
        data = np.zeros((5, 5, 5), dtype=np.uint8)
        data[2, 2, [1, 3]] = 1
        return Mask3D(data, SPACING)

    def test_restores_gap(self):
        p = np.zeros((5, 5, 5))
        p[2, 2, [1, 3]] = 0.8
        out = temporal_refine(self.make(), ProbMap3D(p, SPACING))
        assert out.data[2, 2, 2] == 1

    def test_threshold_is_strict(self):
        p = np.zeros((5, 5, 5))
        p[2, 2, [1, 3]] = 0.6
        out = temporal_refine(self.make(), ProbMap3D(p, SPACING), threshold=0.6)
        assert out.data[2, 2, 2] == 0

    def test_suppress_isolated(self):
        data = np.zeros((5, 5, 5), dtype=np.uint8)
        data[1, 1, 2] = 1
        mask = Mask3D(data, SPACING)
        p = ProbMap3D(np.zeros((5, 5, 5)), SPACING)
        assert temporal_refine(mask, p).data[1, 1, 2] == 1
        assert temporal_refine(mask, p, suppress_isolated=True).data[1, 1, 2] == 0

    def test_edge_slices_untouched(self):
        data = np.ones((3, 3, 4), dtype=np.uint8)
        data[:, :, 0] = 0
        mask = Mask3D(data, SPACING)
        out = temporal_refine(mask, ProbMap3D(np.ones((3, 3, 4)), SPACING), suppress_isolated=True)
        assert out.data[:, :, 0].sum() == 0

    def test_thin_volume_unchanged(self):
        mask = Mask3D(np.ones((3, 3, 2), dtype=np.uint8), SPACING)
        out = temporal_refine(mask, ProbMap3D(np.ones((3, 3, 2)), SPACING))
        np.testing.assert_array_equal(out.data, mask.data)


class TestTemporalInvariants:
    @pytest.fixture(params=range(6))
    def random_case(self, request):
        gen = np.random.default_rng(request.param)
        mask = Mask3D((gen.random((6, 5, 9)) < 0.5).astype(np.uint8), SPACING)
        return mask, ProbMap3D(gen.random((6, 5, 9)), SPACING)

    def test_monotone(self, random_case):
        mask, p = random_case
        out = temporal_refine(mask, p)
        assert not (mask.foreground & ~out.foreground).any()

    def test_idempotent(self, random_case):
        mask, p = random_case
        once = temporal_refine(mask, p)
        np.testing.assert_array_equal(temporal_refine(once, p).data, once.data)
