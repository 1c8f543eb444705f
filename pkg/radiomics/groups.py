"""
Özellik grupları.

Her grup ortak bir RegionContext (yerel kırpma + maske + nicemleme)
üzerinde çalışır; yeni gruplar FeatureGroupFactory'ye kaydedilebilir.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from config.settings import (
    FIRST_ORDER_BIN_WIDTH,
    FIRST_ORDER_BINS,
    GRADIENT_SIGMA_FACTOR,
    TEXTURE_BIN_WIDTH,
    TEXTURE_LEVELS,
)
from models.region import CandidateRegion
from models.volume import ValueKind, Volume3D
from radiomics.intensity import (
    FIRST_ORDER_NAMES,
    GRADIENT_NAMES,
    MOMENT_NAMES,
    first_order_statistics,
    gradient_margin,
    gradient_statistics,
    moment_invariants_of,
)
from radiomics.shape import SHAPE_NAMES, shape_descriptors
from radiomics.texture import (
    DIRECTIONS_13,
    GLCM_NAMES,
    RLM_NAMES,
    Direction,
    glcm_matrix,
    haralick_statistics,
    rlm_matrix,
    run_length_statistics,
)

Spacing = Tuple[float, float, float]


def quantize_equal_width(array: np.ndarray, mask: np.ndarray, n_levels: int) -> np.ndarray:
    """Bölge min..max aralığında eşit genişlikli seviyeler (sabit bölgede hepsi 0)"""
    values = array[mask]
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.zeros(array.shape, dtype=np.int64)
    scaled = np.floor((array - lo) / (hi - lo) * n_levels)
    return np.clip(scaled, 0, n_levels - 1).astype(np.int64)


@dataclass(frozen=True)
class RegionContext:
    """Bir bölgenin özellik hesaplamaya hazır yerel görünümü"""

    image: np.ndarray
    mask: np.ndarray
    spacing: Spacing
    texture_levels: np.ndarray
    first_order_bins: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.image[self.mask]

    @property
    def coords(self) -> np.ndarray:
        return np.argwhere(self.mask)

    @property
    def voxel_volume(self) -> float:
        return float(np.prod(self.spacing))

    @classmethod
    def from_image8(
        cls,
        region: CandidateRegion,
        volume: Volume3D,
        margin: int = gradient_margin(GRADIENT_SIGMA_FACTOR),
    ) -> "RegionContext":
        """0..255 hacimde sabit genişlikli nicemleme ile bağlam"""
        volume.require_kind(ValueKind.NORMALIZED_8BIT)
        region.check_bounds(volume.dims)
        lo = np.maximum(np.asarray(region.bbox[0]) - margin, 0)
        hi = np.minimum(np.asarray(region.bbox[1]) + margin, volume.dims)
        window = tuple(slice(a, b) for a, b in zip(lo, hi))
        image = volume.data[window].astype(np.float64)
        mask = np.zeros(image.shape, dtype=bool)
        local = region.voxels - lo
        mask[local[:, 0], local[:, 1], local[:, 2]] = True
        raw = volume.data[window].astype(np.int64)
        return cls(
            image=image,
            mask=mask,
            spacing=volume.spacing,
            texture_levels=np.minimum(raw // TEXTURE_BIN_WIDTH, TEXTURE_LEVELS - 1),
            first_order_bins=np.minimum(raw // FIRST_ORDER_BIN_WIDTH, FIRST_ORDER_BINS - 1),
        )

    @classmethod
    def from_subband(cls, band: np.ndarray, mask: np.ndarray, spacing: Spacing) -> "RegionContext":
        """Gerçel değerli alt bantta bölge aralığına göre eşit genişlikli nicemleme"""
        return cls(
            image=np.asarray(band, dtype=np.float64),
            mask=np.asarray(mask, dtype=bool),
            spacing=tuple(spacing),
            texture_levels=quantize_equal_width(band, mask, TEXTURE_LEVELS),
            first_order_bins=quantize_equal_width(band, mask, FIRST_ORDER_BINS),
        )


class FeatureGroup(ABC):
    """Tüm özellik gruplarının temel sınıfı"""

    name: str = ""
    feature_names: Tuple[str, ...] = ()

    @abstractmethod
    def compute(self, ctx: RegionContext) -> np.ndarray:
        """Grup özelliklerini feature_names sırasında döndür"""
        pass

    def __len__(self) -> int:
        return len(self.feature_names)


class FirstOrderGroup(FeatureGroup):
    name = "first_order"
    feature_names = FIRST_ORDER_NAMES

    def compute(self, ctx: RegionContext) -> np.ndarray:
        return first_order_statistics(ctx.values, ctx.first_order_bins[ctx.mask], ctx.voxel_volume)


class GradientGroup(FeatureGroup):
    name = "gradient"
    feature_names = GRADIENT_NAMES

    def __init__(self, sigma_factor: float = GRADIENT_SIGMA_FACTOR):
        self.sigma_factor = sigma_factor

    def compute(self, ctx: RegionContext) -> np.ndarray:
        return gradient_statistics(ctx.image, ctx.mask, ctx.spacing, self.sigma_factor)


class RunLengthGroup(FeatureGroup):
    name = "run_length"
    feature_names = RLM_NAMES

    def __init__(self, directions: Sequence[Direction] = DIRECTIONS_13):
        self.directions = tuple(directions)

    def compute(self, ctx: RegionContext) -> np.ndarray:
        matrix = rlm_matrix(ctx.texture_levels, ctx.mask, TEXTURE_LEVELS, self.directions)
        return run_length_statistics(matrix, int(ctx.mask.sum()), len(self.directions))


class GlcmGroup(FeatureGroup):
    name = "glcm"
    feature_names = GLCM_NAMES

    def __init__(self, directions: Sequence[Direction] = DIRECTIONS_13):
        self.directions = tuple(directions)

    def compute(self, ctx: RegionContext) -> np.ndarray:
        return haralick_statistics(glcm_matrix(ctx.texture_levels, ctx.mask, TEXTURE_LEVELS, self.directions))


class ShapeGroup(FeatureGroup):
    name = "shape"
    feature_names = SHAPE_NAMES

    def compute(self, ctx: RegionContext) -> np.ndarray:
        return shape_descriptors(ctx.mask, ctx.spacing)


class MomentGroup(FeatureGroup):
    name = "moments"
    feature_names = MOMENT_NAMES

    def compute(self, ctx: RegionContext) -> np.ndarray:
        return moment_invariants_of(ctx.coords, ctx.values)


class FeatureGroupFactory:
    """Grup adı → sınıf eşlemesi"""

    _GROUP_MAP: Dict[str, type] = {
        "first_order": FirstOrderGroup,
        "gradient": GradientGroup,
        "run_length": RunLengthGroup,
        "glcm": GlcmGroup,
        "shape": ShapeGroup,
        "moments": MomentGroup,
    }

    @classmethod
    def create(cls, name: str, **kwargs) -> FeatureGroup:
        if name not in cls._GROUP_MAP:
            raise KeyError(f"Bilinmeyen özellik grubu: {name}")
        return cls._GROUP_MAP[name](**kwargs)

    @classmethod
    def get_supported_groups(cls) -> list:
        return list(cls._GROUP_MAP)

    @classmethod
    def register_group(cls, name: str, group_class: type):
        cls._GROUP_MAP[name] = group_class


# =============================================================================
# TEK GRUP KISAYOLLARI
# =============================================================================
def first_order_features(region: CandidateRegion, volume: Volume3D) -> np.ndarray:
    return FirstOrderGroup().compute(RegionContext.from_image8(region, volume, margin=0))


def gradient_features(
    region: CandidateRegion,
    volume: Volume3D,
    sigma_factor: float = GRADIENT_SIGMA_FACTOR,
) -> np.ndarray:
    ctx = RegionContext.from_image8(region, volume, margin=gradient_margin(sigma_factor))
    return GradientGroup(sigma_factor).compute(ctx)


def rlm_features(
    region: CandidateRegion,
    volume: Volume3D,
    directions: Optional[Sequence[Direction]] = None,
) -> np.ndarray:
    """directions verilirse yalnızca o yönler (tek yön kontrol modu)"""
    ctx = RegionContext.from_image8(region, volume, margin=0)
    return RunLengthGroup(directions or DIRECTIONS_13).compute(ctx)


def glcm_features(
    region: CandidateRegion,
    volume: Volume3D,
    directions: Optional[Sequence[Direction]] = None,
) -> np.ndarray:
    ctx = RegionContext.from_image8(region, volume, margin=0)
    return GlcmGroup(directions or DIRECTIONS_13).compute(ctx)


def shape_features(region: CandidateRegion, spacing: Spacing) -> np.ndarray:
    local, _ = region.local_mask()
    return shape_descriptors(local, spacing)


def moment_invariants(region: CandidateRegion, volume: Volume3D) -> np.ndarray:
    return MomentGroup().compute(RegionContext.from_image8(region, volume, margin=0))
