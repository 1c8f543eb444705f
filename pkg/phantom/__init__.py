"""
Phantom package initialization.
"""

from .generator import Phantom, generate_phantom
from .patches import make_sphere_patch_dataset
from .perturb import perturb
from .suite import standard_suite

__all__ = [
    'Phantom',
    'generate_phantom',
    'perturb',
    'standard_suite',
    'make_sphere_patch_dataset',
]
