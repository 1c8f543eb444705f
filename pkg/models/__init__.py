"""
Models package initialization.
"""

from .volume import ValueKind, GridField, Volume3D, Mask3D, ProbMap3D, SignedDistanceField, SliceStack
from .region import CandidateRegion, RegionSource, RegionLabel

__all__ = [
    'ValueKind',
    'GridField',
    'Volume3D',
    'Mask3D',
    'ProbMap3D',
    'SignedDistanceField',
    'SliceStack',
    'CandidateRegion',
    'RegionSource',
    'RegionLabel',
]
