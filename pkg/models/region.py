"""
Aday bölge (Ω_k) veri tipi.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from utils.exceptions import EmptyInputError, VolumeFormatError

BBox = Tuple[Tuple[int, int, int], Tuple[int, int, int]]


class RegionSource(str, Enum):
    """Bölgenin kaynağı"""

    LESION_COMPONENT = "lesion-component"
    SAMPLED_NEGATIVE = "sampled-negative"
    HARD_NEGATIVE = "hard-negative"
    PREDICTED_COMPONENT = "predicted-component"
    BOUNDARY_BAND = "boundary-band"


class RegionLabel(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class CandidateRegion:
    """
    Bağlantılı voksel kümesi.

    voxels: (N, 3) int64 koordinat dizisi, Fortran tarama sırasında
    bbox: (alt köşe dahil, üst köşe hariç)
    """

    region_id: str
    voxels: np.ndarray
    source: RegionSource = RegionSource.PREDICTED_COMPONENT
    label: RegionLabel = RegionLabel.UNKNOWN
    radius: Optional[int] = None
    fallback: bool = False
    bbox: BBox = field(init=False)

    def __post_init__(self):
        voxels = np.asarray(self.voxels, dtype=np.int64).reshape(-1, 3)
        if len(voxels) == 0:
            raise EmptyInputError(f"Bölge boş olamaz: {self.region_id}")
        if (voxels < 0).any():
            raise VolumeFormatError(f"Negatif voksel koordinatı: {self.region_id}")
        voxels = np.unique(voxels, axis=0)
        # Fortran tarama sırası: z en yavaş, x en hızlı
        voxels = voxels[np.lexsort((voxels[:, 0], voxels[:, 1], voxels[:, 2]))]
        voxels.setflags(write=False)
        object.__setattr__(self, "voxels", voxels)
        object.__setattr__(self, "source", RegionSource(self.source))
        object.__setattr__(self, "label", RegionLabel(self.label))
        lo = tuple(int(v) for v in voxels.min(axis=0))
        hi = tuple(int(v) + 1 for v in voxels.max(axis=0))
        object.__setattr__(self, "bbox", (lo, hi))

    @property
    def size(self) -> int:
        return int(len(self.voxels))

    @classmethod
    def from_mask(cls, region_id: str, mask: np.ndarray, **kwargs) -> "CandidateRegion":
        """Boolean diziden bölge oluştur"""
        coords = np.argwhere(np.asarray(mask, dtype=bool))
        return cls(region_id, coords, **kwargs)

    def check_bounds(self, dims) -> None:
        if (self.voxels >= np.asarray(dims)).any():
            raise VolumeFormatError(f"Bölge {self.region_id} hacim sınırları dışında: {dims}")

    def to_mask(self, dims) -> np.ndarray:
        """Hacim boyutunda boolean maske"""
        self.check_bounds(dims)
        out = np.zeros(tuple(dims), dtype=bool)
        out[self.voxels[:, 0], self.voxels[:, 1], self.voxels[:, 2]] = True
        return out

    def local_mask(self, margin: int = 0) -> Tuple[np.ndarray, Tuple[int, int, int]]:
        """
        Bbox etrafında yerel maske.

        Returns:
            (maske, orijin): orijin negatif olabilir (kenar payı sınır dışına taşarsa)
        """
        lo = np.asarray(self.bbox[0]) - margin
        hi = np.asarray(self.bbox[1]) + margin
        out = np.zeros(tuple(hi - lo), dtype=bool)
        local = self.voxels - lo
        out[local[:, 0], local[:, 1], local[:, 2]] = True
        return out, tuple(int(v) for v in lo)

    def with_label(self, label: RegionLabel) -> "CandidateRegion":
        return CandidateRegion(self.region_id, self.voxels, self.source, label, self.radius, self.fallback)
