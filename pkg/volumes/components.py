"""
Bağlantılı bileşen etiketleme.

Etiketler ilk karşılaşılan vokselin Fortran tarama sırasına (x en hızlı)
göre 1..K olarak verilir.
"""

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Tuple, Union

import numpy as np
from scipy import ndimage

from models.volume import Mask3D
from utils.exceptions import ConfigError

logger = logging.getLogger(__name__)


class Connectivity(IntEnum):
    """Komşuluk tipi"""

    FACE = 6
    FULL = 26
    INPLANE = 8  # aksiyel düzlemde 8-komşuluk, kesitler arası bağlantı yok


_STRUCTURES = {
    Connectivity.FACE: ndimage.generate_binary_structure(3, 1),
    Connectivity.FULL: ndimage.generate_binary_structure(3, 3),
    Connectivity.INPLANE: np.pad(np.ones((3, 3, 1), dtype=bool), ((0, 0), (0, 0), (1, 1))),
}


@dataclass(frozen=True)
class Component:
    """Tek bağlantılı bileşen"""

    label: int
    size: int
    bbox: Tuple[Tuple[int, int, int], Tuple[int, int, int]]
    voxels: np.ndarray


def structure_for(connectivity: Union[int, Connectivity]) -> np.ndarray:
    try:
        return _STRUCTURES[Connectivity(int(connectivity))]
    except ValueError as e:
        raise ConfigError(f"Desteklenmeyen komşuluk: {connectivity}") from e


def label_array(fg: np.ndarray, connectivity: Union[int, Connectivity] = Connectivity.FULL) -> Tuple[np.ndarray, int]:
    """
    Boolean dizi üzerinde deterministik etiketleme.

    Returns:
        (etiket dizisi int32, bileşen sayısı)
    """
    raw, count = ndimage.label(np.asarray(fg, dtype=bool), structure=structure_for(connectivity))
    if count == 0:
        return raw.astype(np.int32), 0
    flat = raw.ravel(order="F")
    labels, first = np.unique(flat, return_index=True)
    keep = labels > 0
    order = labels[keep][np.argsort(first[keep], kind="stable")]
    remap = np.zeros(count + 1, dtype=np.int32)
    remap[order] = np.arange(1, count + 1, dtype=np.int32)
    return remap[raw], int(count)


def connected_components(
    m: Union[Mask3D, np.ndarray],
    connectivity: Union[int, Connectivity] = Connectivity.FULL,
) -> Tuple[np.ndarray, List[Component]]:
    """
    Maskenin bağlantılı bileşenleri.

    Args:
        m: Mask3D veya boolean dizi
        connectivity: 6, 26 veya 8 (düzlem içi)

    Returns:
        (etiket hacmi, Component listesi etiket sırasıyla)
    """
    fg = m.foreground if isinstance(m, Mask3D) else np.asarray(m, dtype=bool)
    labels, count = label_array(fg, connectivity)
    components: List[Component] = []
    for index, slc in enumerate(ndimage.find_objects(labels), start=1):
        if slc is None:
            continue
        local = np.argwhere(labels[slc] == index)
        offset = np.array([s.start for s in slc])
        voxels = local + offset
        voxels = voxels[np.lexsort((voxels[:, 0], voxels[:, 1], voxels[:, 2]))]
        bbox = (tuple(int(s.start) for s in slc), tuple(int(s.stop) for s in slc))
        components.append(Component(index, int(len(voxels)), bbox, voxels))
    logger.debug(f"{count} bileşen bulundu (komşuluk={int(connectivity)})")
    return labels, components
