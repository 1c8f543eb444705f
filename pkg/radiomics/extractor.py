"""
728 boyutlu radyomik özellik çıkarıcı.

Sıra: çekirdek (80) → sınır bandı (72) → 8 dalgacık alt bandı (8 × 72).
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from config.settings import BOUNDARY_BAND_WIDTH, GRADIENT_SIGMA_FACTOR, WAVELET_BANDS
from models.region import CandidateRegion, RegionLabel
from models.volume import ValueKind, Volume3D
from radiomics.band import boundary_band
from radiomics.groups import FeatureGroup, FeatureGroupFactory, RegionContext
from radiomics.intensity import gradient_margin
from radiomics.manifest import CORE_GROUPS, NON_SHAPE_GROUPS, FeatureManifest
from radiomics.wavelet import downsample_mask, wavelet_subbands
from utils.exceptions import ManifestMismatchError, TumorRefineError
from utils.parallel import ordered_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureVector:
    """Manifestoya hizalı özellik vektörü"""

    region_id: str
    values: np.ndarray
    label: RegionLabel = RegionLabel.UNKNOWN

    def __len__(self) -> int:
        return len(self.values)


class FeatureExtractor:
    """Bölge başına saf (yan etkisiz) özellik çıkarma servisi"""

    def __init__(
        self,
        manifest: Optional[FeatureManifest] = None,
        band_width: int = BOUNDARY_BAND_WIDTH,
        sigma_factor: float = GRADIENT_SIGMA_FACTOR,
    ):
        self.manifest = manifest or FeatureManifest.normative()
        if self.manifest != FeatureManifest.normative():
            raise ManifestMismatchError("Yalnızca normatif 728 girdilik manifesto desteklenir")
        self.band_width = band_width
        self.sigma_factor = sigma_factor
        self.groups: Dict[str, FeatureGroup] = {
            name: FeatureGroupFactory.create(name, sigma_factor=sigma_factor) if name == "gradient"
            else FeatureGroupFactory.create(name)
            for name in CORE_GROUPS
        }
        self.margin = gradient_margin(sigma_factor)

    def _compute(self, ctx: RegionContext, groups: Sequence[str]) -> List[np.ndarray]:
        return [self.groups[name].compute(ctx) for name in groups]

    def _wavelet_parts(self, region: CandidateRegion, volume: Volume3D) -> List[np.ndarray]:
        # alt bant ızgarası orijinal ızgaraya hizalı olsun diye alt köşe çift koordinata çekilir
        margin = 2 * self.margin
        lo = np.maximum(np.asarray(region.bbox[0]) - margin, 0)
        lo -= lo % 2
        hi = np.minimum(np.asarray(region.bbox[1]) + margin, volume.dims)
        window = tuple(slice(a, b) for a, b in zip(lo, hi))
        crop = volume.data[window].astype(np.float64)
        local = np.zeros(crop.shape, dtype=bool)
        rel = region.voxels - lo
        local[rel[:, 0], rel[:, 1], rel[:, 2]] = True

        band_mask = downsample_mask(local)
        band_spacing = tuple(2.0 * s for s in volume.spacing)
        parts = []
        for band in wavelet_subbands(crop).values():
            ctx = RegionContext.from_subband(band, band_mask, band_spacing)
            parts.extend(self._compute(ctx, NON_SHAPE_GROUPS))
        return parts

    def extract(self, region: CandidateRegion, volume: Volume3D) -> FeatureVector:
        """
        Tek bölge için 728 özellik.

        Args:
            region: Aday bölge
            volume: normalized-8bit hacim

        Returns:
            FeatureVector
        """
        volume.require_kind(ValueKind.NORMALIZED_8BIT)
        core_ctx = RegionContext.from_image8(region, volume, self.margin)
        parts = self._compute(core_ctx, CORE_GROUPS)

        band = boundary_band(region, self.band_width, volume.dims)
        band_ctx = RegionContext.from_image8(band, volume, self.margin)
        parts.extend(self._compute(band_ctx, NON_SHAPE_GROUPS))
        parts.extend(self._wavelet_parts(region, volume))

        values = np.concatenate(parts)
        if len(values) != len(self.manifest):
            raise ManifestMismatchError(f"Özellik sayısı {len(values)}, manifesto {len(self.manifest)}")
        if not np.isfinite(values).all():
            bad = [self.manifest.names[i] for i in np.flatnonzero(~np.isfinite(values))[:5]]
            raise TumorRefineError(f"Bölge {region.region_id} için sonlu olmayan özellik: {bad}")
        return FeatureVector(region.region_id, values, region.label)

    def extract_many(
        self,
        regions: Sequence[CandidateRegion],
        volume: Volume3D,
        workers: Optional[int] = None,
    ) -> List[FeatureVector]:
        """Bölge listesinde sıralı (region sırası) çıkarma"""
        vectors = ordered_map(lambda r: self.extract(r, volume), regions, workers=workers, desc="Radyomik özellikler")
        logger.info(f"{len(vectors)} bölge için {len(self.manifest)} özellik çıkarıldı")
        return vectors


def extract_features(
    region: CandidateRegion,
    volume: Volume3D,
    manifest: Optional[FeatureManifest] = None,
) -> FeatureVector:
    """FeatureExtractor kısayolu"""
    return FeatureExtractor(manifest).extract(region, volume)
