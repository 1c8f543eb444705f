"""
Radyomik özellikler: manifesto, gruplar, dalgacık, örnekleyici ve tablo.
"""

import numpy as np
import pytest

from config.settings import FEATURE_GROUP_SIZES, FEATURE_TOTAL, WAVELET_BANDS
from models.region import CandidateRegion, RegionLabel, RegionSource
from models.schemas import SamplerConfig
from models.volume import Mask3D, ValueKind, Volume3D
from radiomics.band import boundary_band
from radiomics.candidates import extract_candidate_regions, extract_positive_regions, harvest_hard_negatives
from radiomics.extractor import FeatureExtractor, FeatureVector
from radiomics.groups import (
    FeatureGroup,
    FeatureGroupFactory,
    glcm_features,
    moment_invariants,
    quantize_equal_width,
    rlm_features,
)
from radiomics.intensity import FIRST_ORDER_NAMES, first_order_statistics, moment_invariants_of
from radiomics.manifest import FeatureManifest, ManifestEntry, QUALIFIERS
from radiomics.sampler import ball_offsets, evaluate_candidate, radius_quotas, sample_negative_regions
from radiomics.shape import SHAPE_NAMES, exposed_face_area, shape_descriptors
from radiomics.table import read_feature_table, write_feature_table
from radiomics.texture import glcm_matrix, rlm_matrix
from radiomics.wavelet import downsample_mask, inverse_wavelet, wavelet_subbands
from tests.conftest import sphere, sphere_mask
from utils.exceptions import ManifestMismatchError, ValueKindError

SPACING = (1.0, 1.0, 1.0)


class TestManifest:
    def test_normative_totals(self):
        manifest = FeatureManifest.normative()
        assert len(manifest) == FEATURE_TOTAL == 728
        assert manifest.group_totals("core") == FEATURE_GROUP_SIZES
        totals = manifest.qualifier_totals()
        assert totals["core"] == 80
        assert totals["band"] == 72
        assert all(totals[f"wavelet_{b}"] == 72 for b in WAVELET_BANDS)
        assert list(totals) == list(QUALIFIERS)

    def test_band_has_no_shape(self):
        manifest = FeatureManifest.normative()
        assert manifest.indices(qualifier="band", group="shape") == []
        assert len(manifest.indices(qualifier="core", group="shape")) == 8

    def test_duplicate_names_rejected(self):
        entry = ManifestEntry("core.x.a", "x", "core")
        with pytest.raises(ManifestMismatchError):
            FeatureManifest([entry, entry])

    def test_save_load(self, tmp_path):
        manifest = FeatureManifest.normative()
        loaded = FeatureManifest.load(manifest.save(tmp_path / "manifest.json"))
        assert loaded == manifest
        assert loaded.index_of(manifest.names[100]) == 100


class TestGroups:
    def test_first_order_basic_values(self):
        values = np.array([1.0, 2.0, 3.0, 4.0])
        out = first_order_statistics(values, np.zeros(4, dtype=np.int64), voxel_volume=2.0)
        assert len(out) == len(FIRST_ORDER_NAMES) == 34
        named = dict(zip(FIRST_ORDER_NAMES, out))
        assert named["min"] == 1.0 and named["max"] == 4.0 and named["range"] == 3.0
        assert named["mean"] == pytest.approx(2.5)
        assert named["variance"] == pytest.approx(1.25)
        assert named["energy"] == pytest.approx(30.0)
        assert named["total_energy"] == pytest.approx(60.0)

    def test_constant_region_has_zero_skewness(self):
        out = dict(zip(FIRST_ORDER_NAMES, first_order_statistics(np.full(5, 7.0), np.zeros(5, dtype=np.int64), 1.0)))
        assert out["std"] == 0.0 and out["skewness"] == 0.0 and out["kurtosis"] == 0.0

    def test_moments_of_line(self):
        coords = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
        j1, j2, j3 = moment_invariants_of(coords, np.ones(3))
        assert j1 == pytest.approx(2.0 / 3.0)
        assert j2 == pytest.approx(0.0, abs=1e-12)
        assert j3 == pytest.approx(0.0, abs=1e-12)

    def test_glcm_uniform_block(self):
        levels = np.zeros((2, 2, 2), dtype=np.int64)
        matrix = glcm_matrix(levels, np.ones((2, 2, 2), dtype=bool), 4, directions=[(1, 0, 0)])
        assert matrix[0, 0] == 8
        assert matrix.sum() == 8

    def test_rlm_single_run(self):
        levels = np.full((3, 1, 1), 2, dtype=np.int64)
        matrix = rlm_matrix(levels, np.ones((3, 1, 1), dtype=bool), 4, directions=[(1, 0, 0)])
        assert matrix[2, 2] == 1
        assert matrix.sum() == 1

    def test_quantize_constant_region(self):
        array = np.full((3, 3, 3), 5.0)
        assert not quantize_equal_width(array, array > 0, 16).any()

    def test_face_area_anisotropic(self):
        assert exposed_face_area(np.ones((1, 1, 1), dtype=bool), (1.0, 2.0, 3.0)) == pytest.approx(22.0)

    def test_cube_shape(self):
        out = dict(zip(SHAPE_NAMES, shape_descriptors(np.ones((4, 4, 4), dtype=bool), SPACING)))
        assert out["volume"] == pytest.approx(64.0)
        assert out["surface_area"] == pytest.approx(96.0)
        assert out["max_diameter"] == pytest.approx(np.sqrt(27.0))
        assert out["elongation"] == pytest.approx(1.0)

    def test_factory(self):
        assert set(FeatureGroupFactory.get_supported_groups()) >= set(FEATURE_GROUP_SIZES)
        with pytest.raises(KeyError):
            FeatureGroupFactory.create("bilinmeyen")
        group = FeatureGroupFactory.create("shape")
        assert isinstance(group, FeatureGroup)
        assert len(group.feature_names) == 8


class TestWavelet:
    def test_perfect_reconstruction(self, rng):
        volume = rng.normal(size=(8, 6, 4))
        bands = wavelet_subbands(volume)
        assert list(bands) == list(WAVELET_BANDS)
        assert all(b.shape == (4, 3, 2) for b in bands.values())
        np.testing.assert_allclose(inverse_wavelet(bands), volume, atol=1e-10)

    def test_odd_dims_padded(self, rng):
        bands = wavelet_subbands(rng.normal(size=(5, 4, 3)))
        assert bands["LLL"].shape == (3, 2, 2)

    def test_constant_volume_has_no_detail(self):
        bands = wavelet_subbands(np.full((4, 4, 4), 3.0))
        assert np.allclose(bands["HHH"], 0.0)
        assert np.allclose(bands["LLL"], 3.0 * 2 ** 1.5)

    def test_downsample_mask(self):
        mask = np.zeros((4, 4, 4), dtype=bool)
        mask[3, 0, 0] = True
        small = downsample_mask(mask)
        assert small.shape == (2, 2, 2)
        assert small[1, 0, 0] and small.sum() == 1


class TestBoundaryBand:
    def test_band_surrounds_boundary(self):
        region = CandidateRegion.from_mask("pos-0001", sphere((20, 20, 20), (10, 10, 10), 4))
        band = boundary_band(region, width=2, dims=(20, 20, 20))
        assert band.region_id == "pos-0001-band"
        assert band.source == RegionSource.BOUNDARY_BAND
        assert not band.fallback
        band_mask = band.to_mask((20, 20, 20))
        assert band_mask[10, 10, 14] and band_mask[10, 10, 15]
        assert not band_mask[10, 10, 10]

    def test_band_clipped_to_volume(self):
        region = CandidateRegion("edge", np.array([[0, 0, 0], [1, 0, 0]]))
        band = boundary_band(region, width=2, dims=(5, 5, 5))
        assert (band.voxels >= 0).all() and (band.voxels < 5).all()


class TestExtractor:
    def test_length_and_determinism(self, normalized_volume):
        region = CandidateRegion.from_mask("cand-0001", sphere(normalized_volume.dims, (8, 8, 6), 3))
        extractor = FeatureExtractor()
        first = extractor.extract(region, normalized_volume)
        second = extractor.extract(region, normalized_volume)
        assert len(first) == 728
        assert np.isfinite(first.values).all()
        np.testing.assert_array_equal(first.values, second.values)

    def test_requires_normalized_volume(self, hu_volume):
        region = CandidateRegion("r", np.array([[2, 2, 2], [3, 2, 2]]))
        with pytest.raises(ValueKindError):
            FeatureExtractor().extract(region, hu_volume)

    def test_extract_many_keeps_order(self, normalized_volume):
        regions = [
            CandidateRegion.from_mask("a", sphere(normalized_volume.dims, (5, 5, 5), 2)),
            CandidateRegion.from_mask("b", sphere(normalized_volume.dims, (10, 10, 6), 2)),
        ]
        vectors = FeatureExtractor().extract_many(regions, normalized_volume, workers=2)
        assert [v.region_id for v in vectors] == ["a", "b"]


class TestSampler:
    def test_radius_quotas(self):
        cfg = SamplerConfig(r_min=2, r_step=2, r_max=6, quota_total=10, boundary_fraction=0.6)
        quotas = radius_quotas(cfg)
        assert quotas == [(2, 3, 1), (4, 2, 1), (6, 1, 2)]
        assert sum(b + i for _, b, i in quotas) == 10
        assert sum(b for _, b, _ in quotas) == 6

    def test_ball_offsets(self):
        assert len(ball_offsets(1)) == 7
        assert len(ball_offsets(0)) == 1

    def test_evaluate_candidate(self):
        liver = np.ones((10, 10, 10), dtype=bool)
        tumor = np.zeros_like(liver)
        cfg = SamplerConfig()
        inside = evaluate_candidate(np.array([5, 5, 5]), 2, liver, tumor, cfg)
        assert inside.accepted and inside.outside_fraction == 0.0
        corner = evaluate_candidate(np.array([0, 0, 0]), 2, liver, tumor, cfg)
        assert not corner.accepted
        assert corner.outside_fraction > 0.2

    def test_tumor_overlap_rejected(self):
        liver = np.ones((10, 10, 10), dtype=bool)
        tumor = sphere((10, 10, 10), (5, 5, 5), 2)
        evaluation = evaluate_candidate(np.array([5, 5, 5]), 2, liver, tumor, SamplerConfig())
        assert evaluation.tumor_fraction == pytest.approx(1.0)
        assert not evaluation.accepted

    def _inputs(self):
        dims = (30, 30, 30)
        ct = Volume3D(np.zeros(dims), SPACING)
        return ct, sphere_mask(dims, (15, 15, 15), 12), sphere_mask(dims, (15, 15, 15), 3)

    def test_sampled_regions_respect_limits(self):
        ct, liver, tumor = self._inputs()
        cfg = SamplerConfig(r_max=4, quota_total=8, seed=5)
        result = sample_negative_regions(ct, liver, tumor, cfg, workers=1)
        assert len(result) == 8
        for region in result:
            assert region.region_id.startswith("neg-r")
            assert region.label == RegionLabel.NEGATIVE
            total = len(ball_offsets(region.radius))
            v = region.voxels
            assert 1.0 - liver.foreground[v[:, 0], v[:, 1], v[:, 2]].sum() / total <= cfg.reject_outside_liver
            assert tumor.foreground[v[:, 0], v[:, 1], v[:, 2]].sum() / total <= cfg.reject_tumor_fraction

    def test_deterministic_across_workers(self):
        ct, liver, tumor = self._inputs()
        cfg = SamplerConfig(r_max=4, quota_total=8, seed=5)
        serial = sample_negative_regions(ct, liver, tumor, cfg, workers=1)
        threaded = sample_negative_regions(ct, liver, tumor, cfg, workers=4)
        assert [r.region_id for r in serial] == [r.region_id for r in threaded]
        for a, b in zip(serial, threaded):
            np.testing.assert_array_equal(a.voxels, b.voxels)

    def test_unfillable_slots_reported(self):
        dims = (12, 12, 12)
        ct = Volume3D(np.zeros(dims), SPACING)
        liver = sphere_mask(dims, (6, 6, 6), 2)
        tumor = Mask3D(np.zeros(dims, dtype=np.uint8), SPACING)
        cfg = SamplerConfig(r_min=8, r_step=2, r_max=8, quota_total=2, seed=1, max_retries=3)
        result = sample_negative_regions(ct, liver, tumor, cfg, workers=1)
        assert len(result) == 0
        assert result.warnings


class TestCandidates:
    def test_positive_and_candidate_regions(self):
        dims = (20, 20, 20)
        mask = Mask3D(sphere(dims, (5, 5, 5), 2) | sphere(dims, (14, 14, 14), 2), SPACING)
        positives = extract_positive_regions(mask)
        assert [r.region_id for r in positives] == ["pos-0001", "pos-0002"]
        assert all(r.label == RegionLabel.POSITIVE for r in positives)
        candidates = extract_candidate_regions(mask)
        assert all(r.label == RegionLabel.UNKNOWN for r in candidates)

    def test_hard_negatives_exclude_lesion(self):
        dims = (20, 20, 20)
        candidate = Mask3D(sphere(dims, (5, 5, 5), 2) | sphere(dims, (14, 14, 14), 2), SPACING)
        tumor = sphere_mask(dims, (5, 5, 5), 2)
        hard = harvest_hard_negatives(candidate, tumor)
        assert len(hard) == 1
        assert hard[0].region_id.startswith("hard-")
        assert hard[0].label == RegionLabel.NEGATIVE
        assert hard[0].voxels.min(axis=0).tolist() == [12, 12, 12]


class TestFeatureTable:
    def test_write_read(self, tmp_path, rng):
        manifest = FeatureManifest.normative()
        vectors = [
            FeatureVector("pos-0001", rng.normal(size=728), RegionLabel.POSITIVE),
            FeatureVector("neg-r02-b000", rng.normal(size=728), RegionLabel.NEGATIVE),
        ]
        path = write_feature_table(vectors, manifest, tmp_path / "features.csv", include_label=True)
        ids, matrix, names, labels = read_feature_table(path, manifest)
        assert ids == ["pos-0001", "neg-r02-b000"]
        assert labels == ["positive", "negative"]
        assert tuple(names) == manifest.names
        np.testing.assert_allclose(matrix, np.vstack([v.values for v in vectors]))

    def test_wrong_columns_rejected(self, tmp_path, rng):
        manifest = FeatureManifest.normative()
        path = write_feature_table([FeatureVector("a", rng.normal(size=728))], manifest, tmp_path / "f.csv")
        other = FeatureManifest(list(reversed(manifest.entries)))
        with pytest.raises(ManifestMismatchError):
            read_feature_table(path, other)


class TestFeatureInvariants:
    @pytest.fixture
    def textured(self, rng):
        data = rng.integers(0, 256, size=(10, 10, 10)).astype(np.uint8)
        fg = sphere((10, 10, 10), (4, 5, 4), 3)
        fg[6:9, 2:4, 5:8] = True
        return data, fg

    @staticmethod
    def as_inputs(data, fg):
        volume = Volume3D(data, SPACING, ValueKind.NORMALIZED_8BIT)
        return CandidateRegion("cand-0001", np.argwhere(fg)), volume

    @pytest.mark.parametrize("axes", [(1, 0, 2), (2, 1, 0), (1, 2, 0)])
    def test_texture_axis_permutation(self, textured, axes):
        data, fg = textured
        original = self.as_inputs(data, fg)
        permuted = self.as_inputs(np.transpose(data, axes), np.transpose(fg, axes))
        for features in (glcm_features, rlm_features):
            np.testing.assert_allclose(features(*permuted), features(*original), rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("k, plane", [(1, (0, 1)), (2, (0, 2)), (3, (1, 2))])
    def test_moments_rotation(self, textured, k, plane):
        data, fg = textured
        rotated = self.as_inputs(np.rot90(data, k, plane).copy(), np.rot90(fg, k, plane).copy())
        np.testing.assert_allclose(
            moment_invariants(*rotated), moment_invariants(*self.as_inputs(data, fg)), rtol=1e-9, atol=1e-9
        )

    @pytest.mark.parametrize("s", [2, 3])
    def test_shape_scaling(self, textured, s):
        _, fg = textured
        base = dict(zip(SHAPE_NAMES, shape_descriptors(fg, SPACING)))
        upsampled = np.kron(fg.astype(np.uint8), np.ones((s, s, s), dtype=np.uint8)) > 0
        scaled = dict(zip(SHAPE_NAMES, shape_descriptors(upsampled, SPACING)))
        assert scaled["volume"] == pytest.approx(base["volume"] * s ** 3)
        assert scaled["surface_area"] == pytest.approx(base["surface_area"] * s ** 2)
        assert scaled["sphericity"] == pytest.approx(base["sphericity"])
