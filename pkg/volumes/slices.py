"""
Komşu aksiyel kesit yığınları.
"""

from typing import Optional

import numpy as np

from models.volume import ProbMap3D, SliceStack, Volume3D
from utils.exceptions import ConfigError


def extract_slice_stack(v: Volume3D, z: int, liver_prior: Optional[ProbMap3D] = None) -> SliceStack:
    """
    [I_{z−1}, I_z, I_{z+1}] yığınını oluştur; kenarlarda kesit tekrarlanır.

    Args:
        v: Kaynak hacim
        z: Merkez kesit indisi
        liver_prior: Verilirse z kesiti 4. kanal olarak eklenir

    Returns:
        SliceStack
    """
    nz = v.dims[2]
    if not 0 <= z < nz:
        raise ConfigError(f"Kesit indisi aralık dışında: {z} (nz={nz})")
    index = [max(z - 1, 0), z, min(z + 1, nz - 1)]
    channels = [v.data[:, :, k].astype(np.float64) for k in index]
    if liver_prior is not None:
        v.check_grid(liver_prior, "karaciğer önseli")
        channels.append(liver_prior.data[:, :, z])
    return SliceStack(np.stack(channels), z, v.spacing)
