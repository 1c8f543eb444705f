"""
Aday bölge kaynakları: uzman etiketli lezyonlar, tahmin bileşenleri ve
zor negatifler.
"""

import logging
from typing import List

import numpy as np

from config.settings import HARD_NEGATIVE_MAX_OVERLAP
from models.region import CandidateRegion, RegionLabel, RegionSource
from models.volume import Mask3D
from volumes.components import Connectivity, connected_components

logger = logging.getLogger(__name__)


def _regions_from_components(
    mask: Mask3D,
    prefix: str,
    source: RegionSource,
    label: RegionLabel,
) -> List[CandidateRegion]:
    _, components = connected_components(mask, Connectivity.FULL)
    return [
        CandidateRegion(f"{prefix}-{c.label:04d}", c.voxels, source=source, label=label)
        for c in components
    ]


def extract_positive_regions(tumor_gt: Mask3D) -> List[CandidateRegion]:
    """Her 26-bağlantılı tümör bileşeni için bir pozitif bölge"""
    return _regions_from_components(tumor_gt, "pos", RegionSource.LESION_COMPONENT, RegionLabel.POSITIVE)


def extract_candidate_regions(candidate_mask: Mask3D) -> List[CandidateRegion]:
    """Tahmin maskesinin 26-bağlantılı bileşenleri (etiketsiz)"""
    return _regions_from_components(candidate_mask, "cand", RegionSource.PREDICTED_COMPONENT, RegionLabel.UNKNOWN)


def harvest_hard_negatives(
    candidate_mask: Mask3D,
    tumor_gt: Mask3D,
    max_overlap: float = HARD_NEGATIVE_MAX_OVERLAP,
) -> List[CandidateRegion]:
    """
    Lezyonla örtüşmesi küçük olan tahmin bileşenleri.

    Args:
        candidate_mask: Eşiklenmiş tahmin maskesi
        tumor_gt: Uzman etiketli tümör maskesi
        max_overlap: Bileşen vokselleri içindeki en yüksek tümör oranı (kesin küçüktür)

    Returns:
        Negatif etiketli bölgeler
    """
    candidate_mask.check_grid(tumor_gt, "tümör maskesi")
    tumor = tumor_gt.foreground
    _, components = connected_components(candidate_mask, Connectivity.FULL)
    regions = []
    for c in components:
        overlap = np.count_nonzero(tumor[c.voxels[:, 0], c.voxels[:, 1], c.voxels[:, 2]]) / c.size
        if overlap < max_overlap:
            regions.append(
                CandidateRegion(
                    f"hard-{c.label:04d}",
                    c.voxels,
                    source=RegionSource.HARD_NEGATIVE,
                    label=RegionLabel.NEGATIVE,
                )
            )
    logger.debug(f"{len(regions)}/{len(components)} bileşen zor negatif olarak seçildi")
    return regions
