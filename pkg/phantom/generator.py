"""
Sentetik fantom üretimi: CT benzeri hacim, karaciğer/tümör maskeleri ve
bozulmuş olasılık haritaları.

Koordinatlar mm cinsindendir; voksel (i, j, k) merkezi (i·sx, j·sy, k·sz).
Tüm rastgelelik spec.seed'den türetilen isimli akışlardan gelir.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

import numpy as np
from scipy import ndimage

from models.schemas import PhantomSpec, VesselSpec
from models.volume import Mask3D, ProbMap3D, ValueKind, Volume3D
from utils.exceptions import LesionOutsideLiverError
from utils.rng import stream
from volumes.distance import signed_distance

logger = logging.getLogger(__name__)

JITTER_BAND_VOXELS = 3.0
JITTER_SMOOTHING = 2.0


@dataclass(frozen=True)
class Phantom:
    """Fantom çıktıları; ilk beş alan üzerinden tuple gibi açılabilir"""

    ct: Volume3D
    liver: Mask3D
    tumor: Mask3D
    p_liver: ProbMap3D
    p_tumor: ProbMap3D
    vessels: Mask3D

    def __iter__(self) -> Iterator:
        return iter((self.ct, self.liver, self.tumor, self.p_liver, self.p_tumor))


def grid_coordinates(dims: Sequence[int], spacing: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    axes = [np.arange(n) * s for n, s in zip(dims, spacing)]
    return np.meshgrid(*axes, indexing="ij")


def ellipsoid(coords, center, radii) -> np.ndarray:
    X, Y, Z = coords
    return (
        ((X - center[0]) / radii[0]) ** 2
        + ((Y - center[1]) / radii[1]) ** 2
        + ((Z - center[2]) / radii[2]) ** 2
    ) <= 1.0


def ball(coords, center, radius) -> np.ndarray:
    X, Y, Z = coords
    return (X - center[0]) ** 2 + (Y - center[1]) ** 2 + (Z - center[2]) ** 2 <= radius ** 2


def segment_distance(coords, start, end) -> np.ndarray:
    """Her noktanın [start, end] doğru parçasına uzaklığı (mm)"""
    a = np.asarray(start, dtype=np.float64)
    b = np.asarray(end, dtype=np.float64)
    ab = b - a
    length2 = float(ab @ ab)
    rel = [c - a[i] for i, c in enumerate(coords)]
    if length2 == 0.0:
        return np.sqrt(sum(r ** 2 for r in rel))
    t = np.clip(sum(r * ab[i] for i, r in enumerate(rel)) / length2, 0.0, 1.0)
    return np.sqrt(sum((r - t * ab[i]) ** 2 for i, r in enumerate(rel)))


def tube(coords, vessel: VesselSpec) -> np.ndarray:
    return segment_distance(coords, vessel.start, vessel.end) <= vessel.radius_mm


def _smooth_noise(rng: np.random.Generator, dims, sigma: float) -> np.ndarray:
    field = ndimage.gaussian_filter(rng.normal(size=dims), sigma, mode="nearest")
    scale = field.std()
    return field / scale if scale > 0 else field


def _dropout_slices(rng: np.random.Generator, nz: int, rate: float) -> np.ndarray:
    """Kenar kesitler hariç, art arda iki kesit seçilmeden düşürülen kesitler"""
    draws = rng.random(nz)
    chosen = np.zeros(nz, dtype=bool)
    for z in range(1, nz - 1):
        if draws[z] < rate and not chosen[z - 1]:
            chosen[z] = True
    return chosen


def generate_phantom(spec: PhantomSpec) -> Phantom:
    """
    Fantomu rasterleştir ve bozulmuş olasılık haritalarını üret.

    Args:
        spec: PhantomSpec

    Returns:
        Phantom (ct, liver, tumor, p_liver, p_tumor, vessels)

    Raises:
        LesionOutsideLiverError: Lezyon tamamen karaciğer içinde değilse
    """
    dims = tuple(spec.dims)
    spacing = tuple(spec.spacing)
    coords = grid_coordinates(dims, spacing)
    liver = ellipsoid(coords, spec.liver.center, spec.liver.radii)

    tumor = np.zeros(dims, dtype=bool)
    ct = np.full(dims, spec.background_hu, dtype=np.float64)
    ct[liver] = spec.liver.hu
    lesion_masks = []
    for index, lesion in enumerate(spec.lesions):
        m = ball(coords, lesion.center, lesion.radius_mm)
        if not m.any():
            raise LesionOutsideLiverError(f"Lezyon {index} hiçbir vokseli kapsamıyor: {lesion.center}")
        if (m & ~liver).any():
            raise LesionOutsideLiverError(
                f"Lezyon {index} karaciğer dışına taşıyor: merkez {lesion.center}, r={lesion.radius_mm} mm"
            )
        lesion_masks.append((m, lesion.hu))
        tumor |= m

    vessels = np.zeros(dims, dtype=bool)
    for vessel in spec.vessels:
        t = tube(coords, vessel) & ~tumor
        ct[t] = vessel.hu
        vessels |= t
    for m, hu in lesion_masks:
        ct[m] = hu

    if spec.noise_sigma_hu > 0:
        ct = ct + stream(spec.seed, "phantom", "ct-noise").normal(0.0, spec.noise_sigma_hu, size=dims)

    deg = spec.degradation
    p_liver = liver.astype(np.float64)
    if deg.liver_blur_sigma > 0:
        p_liver = ndimage.gaussian_filter(p_liver, deg.liver_blur_sigma, mode="constant")

    p_tumor = tumor.astype(np.float64)
    if deg.blur_sigma > 0:
        p_tumor = ndimage.gaussian_filter(p_tumor, deg.blur_sigma, mode="constant")

    if deg.boundary_jitter > 0 and tumor.any():
        d = signed_distance(tumor)
        near = np.abs(d) <= JITTER_BAND_VOXELS
        noise = _smooth_noise(stream(spec.seed, "phantom", "jitter"), dims, JITTER_SMOOTHING)
        p_tumor = np.where(near, p_tumor + deg.boundary_jitter * noise, p_tumor)

    if deg.slice_dropout_rate > 0:
        dropped = _dropout_slices(stream(spec.seed, "phantom", "dropout"), dims[2], deg.slice_dropout_rate)
        p_tumor[:, :, dropped] *= deg.slice_dropout_factor
        logger.debug(f"Olasılık haritasında {int(dropped.sum())} kesit zayıflatıldı")

    if deg.vessel_leak > 0 and vessels.any():
        p_tumor = np.maximum(p_tumor, deg.vessel_leak * vessels)

    if deg.speckle_rate > 0:
        rng = stream(spec.seed, "phantom", "speckle")
        hits = (rng.random(dims) < deg.speckle_rate) & liver & ~tumor & ~vessels
        values = deg.speckle_amplitude * rng.uniform(0.85, 1.0, size=dims)
        p_tumor = np.where(hits, np.maximum(p_tumor, values), p_tumor)

    p_tumor = np.clip(p_tumor, 0.0, 1.0)
    p_liver = np.clip(p_liver, 0.0, 1.0)
    logger.info(
        f"Fantom üretildi: {dims}, {len(spec.lesions)} lezyon, {len(spec.vessels)} damar, "
        f"tümör {int(tumor.sum())} voksel"
    )
    return Phantom(
        ct=Volume3D(ct, spacing, ValueKind.HU_FLOAT),
        liver=Mask3D(liver, spacing),
        tumor=Mask3D(tumor, spacing),
        p_liver=ProbMap3D(p_liver, spacing),
        p_tumor=ProbMap3D(p_tumor, spacing),
        vessels=Mask3D(vessels, spacing),
    )
