"""
Kesit başına morfolojik düzeltme: B̂ = (B ⊖ S) ⊕ S, S = 3×3 aksiyel kare.
"""

import numpy as np
from scipy import ndimage

from config.settings import MORPH_SE_SIZE
from models.volume import Mask3D

# (3, 3, 1): kesitler arası etkileşim yok
STRUCTURING_ELEMENT = np.ones((MORPH_SE_SIZE, MORPH_SE_SIZE, 1), dtype=bool)


def morph_smooth(m: Mask3D) -> Mask3D:
    """
    Aşındırma ardından genişletme (hacim dışı arka plan).

    Args:
        m: Girdi maskesi

    Returns:
        Mask3D: 3×3 kareyi içermeyen düzlem içi bileşenler silinmiş maske
    """
    eroded = ndimage.binary_erosion(m.foreground, structure=STRUCTURING_ELEMENT, border_value=0)
    opened = ndimage.binary_dilation(eroded, structure=STRUCTURING_ELEMENT)
    return m.with_data(opened.astype(np.uint8))
