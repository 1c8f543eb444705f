"""
Voksel tabanlı şekil tanımlayıcıları (ağ/mesh kullanılmaz).
"""

import logging
from typing import Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from volumes.distance import boundary_voxels

logger = logging.getLogger(__name__)

SHAPE_NAMES = (
    "volume", "surface_area", "sphericity", "compactness1", "compactness2",
    "elongation", "flatness", "max_diameter",
)


def exposed_face_area(mask: np.ndarray, spacing: Tuple[float, float, float]) -> float:
    """Arka plana (veya hacim dışına) bakan voksel yüzlerinin toplam alanı"""
    padded = np.pad(np.asarray(mask, dtype=bool), 1)
    sx, sy, sz = spacing
    face_areas = (sy * sz, sx * sz, sx * sy)
    area = 0.0
    for axis, face in enumerate(face_areas):
        transitions = np.count_nonzero(np.diff(padded, axis=axis))
        area += transitions * face
    return float(area)


def max_diameter(points: np.ndarray) -> float:
    """En büyük çift mesafe; dışbükey zarf köşeleri üzerinden, dejenere durumda tüm noktalar"""
    if len(points) < 2:
        return 0.0
    candidates = points
    if len(points) >= 4:
        try:
            candidates = points[ConvexHull(points).vertices]
        except QhullError:
            logger.debug("Dışbükey zarf dejenere, tüm sınır noktaları kullanılıyor")
    return float(pdist(candidates).max())


def shape_descriptors(mask: np.ndarray, spacing: Tuple[float, float, float]) -> np.ndarray:
    """
    8 şekil özelliği.

    Args:
        mask: Yerel bölge maskesi
        spacing: Fiziksel aralık (mm)

    Returns:
        SHAPE_NAMES sırasında dizi
    """
    mask = np.asarray(mask, dtype=bool)
    scale = np.asarray(spacing, dtype=np.float64)
    n = int(np.count_nonzero(mask))
    volume = n * float(np.prod(scale))
    area = exposed_face_area(mask, spacing)

    sphericity = np.pi ** (1.0 / 3.0) * (6.0 * volume) ** (2.0 / 3.0) / area
    compactness1 = volume / (np.sqrt(np.pi) * area ** 1.5)
    compactness2 = 36.0 * np.pi * volume ** 2 / area ** 3

    points = np.argwhere(mask) * scale
    if n > 1:
        eigvals = np.sort(np.linalg.eigvalsh(np.cov(points, rowvar=False, bias=True)))[::-1]
        eigvals = np.clip(eigvals, 0.0, None)
    else:
        eigvals = np.zeros(3)
    if eigvals[0] > 0:
        elongation = float(np.sqrt(eigvals[1] / eigvals[0]))
        flatness = float(np.sqrt(eigvals[2] / eigvals[0]))
    else:
        elongation = flatness = 1.0

    surface_points = np.argwhere(boundary_voxels(mask)) * scale
    diameter = max_diameter(surface_points)

    return np.array([
        volume, area, sphericity, compactness1, compactness2, elongation, flatness, diameter,
    ], dtype=np.float64)
