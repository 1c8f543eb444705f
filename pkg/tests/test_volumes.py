"""
Hacim tipleri, dosya formatları, ön işleme, bileşenler ve mesafe dönüşümü.
"""

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from models.region import CandidateRegion
from models.volume import Mask3D, ProbMap3D, SliceStack, ValueKind, Volume3D
from tests.conftest import sphere, sphere_mask
from utils.exceptions import (
    ConfigError,
    EmptyInputError,
    GridMismatchError,
    ShapeMismatchError,
    ValueKindError,
    VolumeFormatError,
)
from volumes.components import Connectivity, connected_components, label_array
from volumes.distance import boundary_voxels, signed_distance, signed_edt
from volumes.io import load_volume, save_volume
from volumes.preprocessing import clip_rescale_hu, crop_or_pad, resample_isotropic, resampled_dims
from volumes.slices import extract_slice_stack
from config.settings import EDT_INF


class TestGridTypes:
    def test_volume_is_read_only(self, hu_volume):
        with pytest.raises(ValueError):
            hu_volume.data[0, 0, 0] = 1.0

    def test_rejects_bad_spacing(self):
        with pytest.raises(VolumeFormatError):
            Volume3D(np.zeros((2, 2, 2)), (1.0, 0.0, 1.0))

    def test_rejects_non_3d(self):
        with pytest.raises(VolumeFormatError):
            Mask3D(np.zeros((4, 4)), (1.0, 1.0, 1.0))

    def test_mask_values_must_be_binary(self):
        with pytest.raises(VolumeFormatError):
            Mask3D(np.full((2, 2, 2), 2), (1.0, 1.0, 1.0))

    def test_prob_range(self):
        with pytest.raises(VolumeFormatError):
            ProbMap3D(np.full((2, 2, 2), 1.5), (1.0, 1.0, 1.0))

    def test_normalized_range(self):
        with pytest.raises(VolumeFormatError):
            Volume3D(np.full((2, 2, 2), 300), (1.0, 1.0, 1.0), ValueKind.NORMALIZED_8BIT)

    def test_check_grid(self):
        a = Mask3D(np.zeros((3, 3, 3)), (1.0, 1.0, 1.0))
        b = Mask3D(np.zeros((3, 3, 3)), (1.0, 1.0, 2.0))
        with pytest.raises(GridMismatchError):
            a.check_grid(b)

    def test_slice_stack_channels(self):
        with pytest.raises(ShapeMismatchError):
            SliceStack(np.zeros((2, 4, 4)), 0)


class TestCandidateRegion:
    def test_voxels_sorted_fortran_order(self):
        region = CandidateRegion("r", [[1, 0, 1], [0, 0, 0], [1, 0, 0], [0, 0, 1]])
        assert region.voxels.tolist() == [[0, 0, 0], [1, 0, 0], [0, 0, 1], [1, 0, 1]]
        assert region.bbox == ((0, 0, 0), (2, 1, 2))

    def test_empty_region_rejected(self):
        with pytest.raises(EmptyInputError):
            CandidateRegion("r", np.zeros((0, 3)))

    def test_to_mask_roundtrip(self):
        fg = sphere((9, 9, 9), (4, 4, 4), 2)
        region = CandidateRegion.from_mask("s", fg)
        assert region.size == int(fg.sum())
        np.testing.assert_array_equal(region.to_mask((9, 9, 9)), fg)


class TestVolumeIO:
    @pytest.mark.parametrize("suffix", [".vol", ".mhd", ".mha"])
    def test_mask_roundtrip(self, tmp_path, suffix):
        mask = sphere_mask((10, 9, 8), (5, 4, 4), 3, spacing=(0.5, 0.75, 2.0))
        path = save_volume(mask, tmp_path / f"mask{suffix}")
        loaded = load_volume(path, "mask")
        np.testing.assert_array_equal(loaded.data, mask.data)
        assert loaded.spacing == mask.spacing

    def test_hu_volume_loads_as_hu(self, tmp_path):
        volume = Volume3D(np.arange(24, dtype=np.float64).reshape(2, 3, 4) - 10.0, (1.0, 1.0, 1.0))
        loaded = load_volume(save_volume(volume, tmp_path / "ct.mha"))
        assert loaded.value_kind is ValueKind.HU_FLOAT
        np.testing.assert_array_equal(loaded.data, volume.data)

    def test_u8_loads_as_normalized(self, tmp_path, normalized_volume):
        loaded = load_volume(save_volume(normalized_volume, tmp_path / "v.vol"))
        assert loaded.value_kind is ValueKind.NORMALIZED_8BIT
        np.testing.assert_array_equal(loaded.data, normalized_volume.data)

    def test_fortran_order_on_disk(self, tmp_path):
        data = np.arange(6, dtype=np.uint8).reshape(3, 2, 1)
        path = save_volume(Mask3D(data > 2, (1.0, 1.0, 1.0)), tmp_path / "m.vol")
        raw = path.read_bytes()[-6:]
        assert list(raw) == [int(v) for v in (data > 2).ravel(order="F")]

    def test_unknown_suffix(self, tmp_path):
        with pytest.raises(VolumeFormatError):
            save_volume(sphere_mask((4, 4, 4), (2, 2, 2), 1), tmp_path / "m.nii")

    def test_truncated_file(self, tmp_path):
        path = save_volume(sphere_mask((6, 6, 6), (3, 3, 3), 2), tmp_path / "m.vol")
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(VolumeFormatError):
            load_volume(path, "mask")


class TestPreprocessing:
    def test_window_mapping(self):
        v = Volume3D(np.array([-500.0, -100.0, 150.0, 400.0, 900.0]).reshape(5, 1, 1), (1.0, 1.0, 1.0))
        out = clip_rescale_hu(v)
        assert out.value_kind is ValueKind.NORMALIZED_8BIT
        assert out.data.ravel().tolist() == [0, 0, 128, 255, 255]

    def test_monotone(self, hu_volume):
        out = clip_rescale_hu(hu_volume).data.ravel().astype(int)
        order = np.argsort(hu_volume.data.ravel(), kind="stable")
        assert (np.diff(out[order]) >= 0).all()

    def test_second_application_rejected(self, hu_volume):
        with pytest.raises(ValueKindError):
            clip_rescale_hu(clip_rescale_hu(hu_volume))

    def test_resample_dims(self):
        assert resampled_dims((10, 10, 5), (1.0, 1.0, 2.5), 1.0) == (10, 10, 13)

    def test_resample_identity(self, hu_volume):
        iso = Volume3D(hu_volume.data, (1.0, 1.0, 1.0))
        assert resample_isotropic(iso, 1.0) is iso

    def test_resample_mask_stays_binary(self):
        mask = sphere_mask((10, 10, 5), (5, 5, 2), 2, spacing=(1.0, 1.0, 2.0))
        out = resample_isotropic(mask, 1.0)
        assert isinstance(out, Mask3D)
        assert out.dims == (10, 10, 10)
        assert set(np.unique(out.data)) <= {0, 1}

    def test_resample_rejects_nonpositive(self, hu_volume):
        with pytest.raises(ConfigError):
            resample_isotropic(hu_volume, 0.0)

    def test_crop_or_pad_fill(self, hu_volume):
        out = crop_or_pad(hu_volume, ((-2, 0, 0), (4, 3, 2)))
        assert out.dims == (6, 3, 2)
        assert (out.data[:2] == -1000.0).all()
        np.testing.assert_array_equal(out.data[2:], hu_volume.data[:4, :3, :2])

    def test_crop_or_pad_invalid(self, hu_volume):
        with pytest.raises(ConfigError):
            crop_or_pad(hu_volume, ((3, 0, 0), (3, 2, 2)))


class TestSliceStack:
    def test_edges_replicated(self, normalized_volume):
        stack = extract_slice_stack(normalized_volume, 0)
        np.testing.assert_array_equal(stack.slices[0], stack.slices[1])
        assert stack.channels == 3

    def test_liver_prior_channel(self, normalized_volume):
        prior = ProbMap3D(np.full(normalized_volume.dims, 0.5), normalized_volume.spacing)
        assert extract_slice_stack(normalized_volume, 3, prior).channels == 4

    def test_out_of_range(self, normalized_volume):
        with pytest.raises(ConfigError):
            extract_slice_stack(normalized_volume, normalized_volume.dims[2])


class TestComponents:
    def test_labels_in_fortran_first_seen_order(self):
        fg = np.zeros((6, 6, 3), dtype=bool)
        fg[4, 0, 0] = True  # x en hızlı: önce görülür
        fg[0, 3, 0] = True
        labels, count = label_array(fg)
        assert count == 2
        assert labels[4, 0, 0] == 1 and labels[0, 3, 0] == 2

    def test_diagonal_connectivity(self):
        fg = np.zeros((3, 3, 3), dtype=bool)
        fg[0, 0, 0] = fg[1, 1, 1] = True
        assert len(connected_components(fg, Connectivity.FULL)[1]) == 1
        assert len(connected_components(fg, Connectivity.FACE)[1]) == 2

    def test_inplane_does_not_join_slices(self):
        fg = np.zeros((3, 3, 3), dtype=bool)
        fg[1, 1, 0] = fg[1, 1, 1] = True
        assert len(connected_components(fg, Connectivity.INPLANE)[1]) == 2

    def test_component_records(self):
        _, comps = connected_components(sphere_mask((9, 9, 9), (4, 4, 4), 2))
        assert len(comps) == 1
        assert comps[0].size == len(comps[0].voxels)
        assert comps[0].bbox == ((2, 2, 2), (7, 7, 7))

    def test_unsupported_connectivity(self):
        with pytest.raises(ConfigError):
            connected_components(np.zeros((2, 2, 2), dtype=bool), 18)


class TestSignedDistance:
    def test_sign_convention(self):
        fg = sphere((15, 15, 15), (7, 7, 7), 4)
        d = signed_distance(fg)
        boundary = boundary_voxels(fg)
        assert (d[boundary] == 0).all()
        assert (d[fg & ~boundary] < 0).all()
        assert (d[~fg] > 0).all()
        assert d[7, 7, 7] < -3.0

    def test_empty_mask_is_infinite(self):
        d = signed_distance(np.zeros((4, 4, 4), dtype=bool))
        assert (d == EDT_INF).all()

    def test_field_keeps_spacing(self):
        mask = sphere_mask((8, 8, 8), (4, 4, 4), 2, spacing=(0.5, 0.5, 1.0))
        assert signed_edt(mask).spacing == (0.5, 0.5, 1.0)


def brute_force_signed_distance(fg: np.ndarray) -> np.ndarray:
    """Her vokselden tüm sınır voksellerine doğrudan mesafe"""
    padded = np.pad(fg, 1)
    core = padded[1:-1, 1:-1, 1:-1]
    interior = core.copy()
    for axis in range(3):
        for shift in (-1, 1):
            interior &= np.roll(padded, shift, axis=axis)[1:-1, 1:-1, 1:-1]
    boundary = core & ~interior
    points = np.argwhere(np.ones(fg.shape, dtype=bool))
    nearest = cdist(points, np.argwhere(boundary)).min(axis=1).reshape(fg.shape)
    return np.where(interior, -nearest, nearest)


class TestDistanceAgainstBruteForce:
    @pytest.mark.parametrize("seed", range(12))
    def test_random_masks(self, seed):
        gen = np.random.default_rng(seed)
        dims = tuple(int(n) for n in gen.integers(3, 13, size=3))
        fg = gen.random(dims) < gen.uniform(0.2, 0.8)
        fg[tuple(n // 2 for n in dims)] = True
        np.testing.assert_allclose(signed_edt(fg).data, brute_force_signed_distance(fg), atol=1e-9)

    def test_full_block(self):
        fg = np.ones((5, 6, 7), dtype=bool)
        np.testing.assert_allclose(signed_distance(fg), brute_force_signed_distance(fg), atol=1e-9)


class TestComponentPermutation:
    @staticmethod
    def voxel_sets(fg, connectivity, axes=(0, 1, 2)):
        inverse = np.argsort(axes)
        _, comps = connected_components(fg, connectivity)
        return sorted(
            tuple(sorted(map(tuple, c.voxels[:, inverse].tolist()))) for c in comps
        )

    @pytest.mark.parametrize("connectivity", [Connectivity.FACE, Connectivity.FULL])
    @pytest.mark.parametrize("axes", [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)])
    def test_axis_permutation(self, rng, connectivity, axes):
        for _ in range(5):
            fg = rng.random((7, 8, 9)) < 0.3
            expected = self.voxel_sets(fg, connectivity)
            assert self.voxel_sets(np.transpose(fg, axes), connectivity, axes) == expected
