"""
Bölge sınırı etrafındaki dar bant.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from config.settings import BOUNDARY_BAND_WIDTH
from models.region import CandidateRegion, RegionSource
from volumes.distance import signed_distance

logger = logging.getLogger(__name__)


def boundary_band(
    region: CandidateRegion,
    width: int = BOUNDARY_BAND_WIDTH,
    dims: Optional[Sequence[int]] = None,
) -> CandidateRegion:
    """
    Bölge maskesine göre işaretli mesafesi [−width, +width] olan vokseller.

    Args:
        region: Kaynak bölge
        width: Bant yarı genişliği (voksel)
        dims: Verilirse bant hacim sınırlarına kırpılır

    Returns:
        Bant bölgesi; bant boşsa bölgenin kendisi (fallback=True)
    """
    local, origin = region.local_mask(margin=int(np.ceil(width)) + 1)
    d = signed_distance(local)
    coords = np.argwhere(np.abs(d) <= width) + np.asarray(origin)
    keep = (coords >= 0).all(axis=1)
    if dims is not None:
        keep &= (coords < np.asarray(dims)).all(axis=1)
    coords = coords[keep]
    if len(coords) == 0:
        logger.warning(f"Bölge {region.region_id} için sınır bandı boş, bölgenin tamamı kullanılıyor")
        return CandidateRegion(
            f"{region.region_id}-band", region.voxels, RegionSource.BOUNDARY_BAND, region.label,
            region.radius, fallback=True,
        )
    return CandidateRegion(
        f"{region.region_id}-band", coords, RegionSource.BOUNDARY_BAND, region.label, region.radius,
    )
