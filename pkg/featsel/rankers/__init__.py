"""
Rankers package initialization.
"""

from .base_ranker import BaseRanker, FeatureRanking
from .ranker_factory import RankerFactory

__all__ = [
    'BaseRanker',
    'FeatureRanking',
    'RankerFactory',
]
