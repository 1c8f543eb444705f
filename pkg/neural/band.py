"""
Sınır bandı vokselleri: veri kümesi üretimi ve CNN ile yeniden etiketleme.

Band Γ = {v : |d(v)| ≤ d_max}; d ≤ 0 (içeride veya sınırda) pozitif,
0 < d ≤ d_max negatif etiket alır.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from config.settings import CNN_D_MAX, NORMALIZED_MAX
from models.volume import Mask3D, ValueKind, Volume3D
from neural.cnn3d import Cnn3dModel
from utils.exceptions import EmptyInputError, ShapeMismatchError
from volumes.distance import signed_distance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BandDataset:
    """Band vokselleri (N, 3), etiketler (N,) ve işaretli mesafeler (N,)"""

    coords: np.ndarray
    labels: np.ndarray
    distances: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_positive(self) -> int:
        return int(self.labels.sum())

    @property
    def n_negative(self) -> int:
        return len(self) - self.n_positive


def band_coordinates(mask: Mask3D, d_max: float = CNN_D_MAX):
    """(koordinatlar, mesafeler), Fortran tarama sırasında"""
    if mask.count == 0:
        raise EmptyInputError("Boş maske için sınır bandı tanımsız")
    d = signed_distance(mask.foreground)
    inside = np.abs(d) <= d_max
    coords = np.argwhere(inside)
    order = np.lexsort((coords[:, 0], coords[:, 1], coords[:, 2]))
    coords = coords[order]
    return coords, d[tuple(coords.T)]


def make_band_dataset(volume: Volume3D, mask: Mask3D, d_max: float = CNN_D_MAX) -> BandDataset:
    """
    Args:
        volume: Hacim (ızgara kontrolü için)
        mask: Referans tümör maskesi
        d_max: Band yarı genişliği (voksel)

    Returns:
        BandDataset
    """
    volume.check_grid(mask, "band maskesi")
    coords, distances = band_coordinates(mask, d_max)
    labels = (distances <= 0).astype(np.int64)
    logger.debug(f"Band: {len(labels)} voksel, {int(labels.sum())} pozitif")
    return BandDataset(coords, labels, distances)


def extract_patches(volume: Volume3D, coords: np.ndarray, s: int) -> np.ndarray:
    """
    Merkezli s³ yamalar; hacim dışı indisler kenara kırpılır, değerler /255.

    Returns:
        (N, s, s, s) float64
    """
    volume.require_kind(ValueKind.NORMALIZED_8BIT)
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
    half = s // 2
    offsets = np.arange(-half, half + 1)
    data = volume.data
    axes = []
    for a in range(3):
        idx = np.clip(coords[:, a, None] + offsets[None, :], 0, data.shape[a] - 1)
        axes.append(idx)
    ix = axes[0][:, :, None, None]
    iy = axes[1][:, None, :, None]
    iz = axes[2][:, None, None, :]
    return data[ix, iy, iz].astype(np.float64) / NORMALIZED_MAX


class VoxelClassifier(Protocol):
    """refine_labels'ın tükettiği arayüz"""

    patch_size: int

    def predict_voxels(self, volume: Volume3D, coords: np.ndarray) -> np.ndarray:
        ...


class CnnVoxelClassifier:
    """Cnn3dModel'i voksel sınıflandırıcı olarak sarmalar"""

    def __init__(self, model: Cnn3dModel, chunk: int = 256):
        self.model = model
        self.patch_size = model.patch_size
        self.chunk = chunk

    def predict_voxels(self, volume: Volume3D, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
        out = []
        for start in range(0, len(coords), self.chunk):
            patches = extract_patches(volume, coords[start:start + self.chunk], self.patch_size)
            out.append(self.model.predict(patches))
        return np.concatenate(out) if out else np.zeros(0)


def refine_labels(
    mask: Mask3D,
    volume: Volume3D,
    classifier: VoxelClassifier,
    d_max: float = CNN_D_MAX,
    patch_size: Optional[int] = None,
) -> Mask3D:
    """
    Band voksellerini sınıflandırıcı çıktısı ≥ 0.5 ise tümör olarak yeniden etiketle.
    Band dışındaki vokseller değişmez; boş maske olduğu gibi döner.

    Args:
        mask: Mevcut tümör maskesi
        volume: normalized-8bit hacim
        classifier: VoxelClassifier
        d_max: Band yarı genişliği
        patch_size: Beklenen yama boyutu (verilirse sınıflandırıcıyla eşleşmeli)

    Returns:
        Mask3D
    """
    volume.check_grid(mask, "iyileştirme maskesi")
    if patch_size is not None and classifier.patch_size != patch_size:
        raise ShapeMismatchError(f"Model yama boyutu {classifier.patch_size}, beklenen {patch_size}")
    if mask.count == 0:
        logger.warning("Boş maske: sınır bandı iyileştirmesi atlandı")
        return mask
    coords, _ = band_coordinates(mask, d_max)
    q = np.asarray(classifier.predict_voxels(volume, coords), dtype=np.float64)
    data = mask.data.copy()
    data[tuple(coords.T)] = (q >= 0.5).astype(np.uint8)
    changed = int(np.count_nonzero(data != mask.data))
    logger.info(f"Band iyileştirme: {len(coords)} voksel değerlendirildi, {changed} değişti")
    return mask.with_data(data)
