"""
İşaretli Öklid mesafe dönüşümü (voksel birimi).
"""

from typing import Union

import numpy as np
from scipy import ndimage

from config.settings import EDT_INF
from models.volume import Mask3D, SignedDistanceField

_FACE = ndimage.generate_binary_structure(3, 1)


def boundary_voxels(fg: np.ndarray) -> np.ndarray:
    """En az bir 6-komşusu arka plan olan ön plan vokselleri (hacim dışı arka plan sayılır)"""
    fg = np.asarray(fg, dtype=bool)
    return fg & ~ndimage.binary_erosion(fg, structure=_FACE, border_value=0)


def signed_distance(fg: np.ndarray) -> np.ndarray:
    """
    Boolean dizi için işaretli mesafe.

    Her vokselin en yakın sınır vokseline olan tam Öklid mesafesi; sınırda
    0, içeride negatif, dışarıda pozitif. Boş maskede her yer EDT_INF.
    """
    fg = np.asarray(fg, dtype=bool)
    boundary = boundary_voxels(fg)
    if not boundary.any():
        return np.full(fg.shape, EDT_INF, dtype=np.float64)
    dist = ndimage.distance_transform_edt(~boundary)
    return np.where(fg & ~boundary, -dist, dist)


def signed_edt(m: Union[Mask3D, np.ndarray]) -> SignedDistanceField:
    """Mask3D için işaretli mesafe alanı"""
    if isinstance(m, Mask3D):
        return SignedDistanceField(signed_distance(m.foreground), m.spacing)
    return SignedDistanceField(signed_distance(m), (1.0, 1.0, 1.0))
