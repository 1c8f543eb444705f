"""
Volumes package initialization.
"""

from .io import load_volume, save_volume
from .preprocessing import clip_rescale_hu, resample_isotropic, crop_or_pad
from .slices import extract_slice_stack
from .components import Connectivity, Component, connected_components
from .distance import signed_edt

__all__ = [
    'load_volume',
    'save_volume',
    'clip_rescale_hu',
    'resample_isotropic',
    'crop_or_pad',
    'extract_slice_stack',
    'Connectivity',
    'Component',
    'connected_components',
    'signed_edt',
]
