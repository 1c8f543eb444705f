"""
Utils package initialization.
"""

from .exceptions import TumorRefineError, StageError, ConfigError
from .rng import stream, derive_seed

__all__ = [
    'TumorRefineError',
    'StageError',
    'ConfigError',
    'stream',
    'derive_seed',
]
