"""
Postproc package initialization.
"""

from .otsu import Histogram256, OtsuResult, otsu_threshold, binarize, binarize_channels, histogram_from_levels
from .morphology import morph_smooth
from .temporal import temporal_refine

__all__ = [
    'Histogram256',
    'OtsuResult',
    'otsu_threshold',
    'binarize',
    'binarize_channels',
    'histogram_from_levels',
    'morph_smooth',
    'temporal_refine',
]
